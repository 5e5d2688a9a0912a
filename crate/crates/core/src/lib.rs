//! Symbolic toolkit for Abel differential equations.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod eval;
pub mod expr;
pub mod gcd;
pub mod integrate;
pub mod numeric;
pub mod ode;
pub mod parse;
pub mod poly;
pub mod print;
pub mod ratfun;
pub mod reduce;
pub mod scalar;
pub mod solve;
pub mod symbol;
pub mod tower;
pub mod transform;
pub mod upoly;

pub use error::{Error, Result};
pub use expr::Expr;
pub use ratfun::RationalFunction;
