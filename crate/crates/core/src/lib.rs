pub mod analysis;
pub mod config;
pub mod domains;
pub mod experiment;
pub mod extract;
pub mod heuristic;
pub mod lpmodel;
pub mod model;
pub mod num;
pub mod rpg;
pub mod search;
