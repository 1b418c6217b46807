use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PddlError {
    #[error("syntax error at {line}:{col}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("unsupported construct `{construct}` at line {line}")]
    Unsupported { construct: String, line: usize },
    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },
    #[error("missing initial value for `{0}`")]
    MissingInitialValue(String),
    #[error("{0}")]
    Invalid(String),
    #[error("grounding exceeded the cap of {0} actions")]
    TooManyActions(usize),
}
