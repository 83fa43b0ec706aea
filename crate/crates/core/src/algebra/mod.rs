//! Exact arithmetic: finite fields, polynomials, rational functions and
//! linear solving.

pub mod field;
pub mod linalg;
pub mod poly;
pub mod ratfunc;

pub use field::{FieldCtx, FqElem};
pub use linalg::{null_space, solve_linear, FqBasis};
pub use poly::Poly;
pub use ratfunc::RatFunc;
