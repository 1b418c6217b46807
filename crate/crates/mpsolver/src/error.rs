use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("variable index {0} out of range")]
    VarOutOfRange(usize),
    #[error("constraint index {0} out of range")]
    RowOutOfRange(usize),
    #[error("invalid bounds [{lower}, {upper}]")]
    InvalidBounds { lower: f64, upper: f64 },
    #[error("pop_scratch without matching push_scratch")]
    ScratchUnderflow,
}
