//! Cyclic relation for Euler-Zagier multiple zeta functions.
//!
//! * [`model`]: shapes, arguments, summation domains and convergence domains.
//! * [`series`]: truncated evaluation of the complex-argument series.
//! * [`poset`]: exact decomposition of constrained sums into MZV symbols.
//! * [`relations`]: MZV relation families, relation matrices and exact ranks.

pub mod error;
pub mod model;
pub mod poset;
pub mod relations;
pub mod series;

pub use error::{Error, Result};
