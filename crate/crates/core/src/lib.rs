pub mod algebra;
pub mod automaton;
pub mod cli;
pub mod complexity;
pub mod error;
pub mod function_field;
pub mod kernel;
pub mod rational_sweep;
pub mod series;

pub use error::{Error, ErrorKind, Result};
