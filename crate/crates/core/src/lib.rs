//! Exact jet calculus on a coordinate chart.

// index loops mirror the tensor formulas
#![allow(clippy::needless_range_loop)]

pub mod arrow;
pub mod cli;
pub mod error;
pub mod forms;
pub mod identities;
pub mod jet;
pub mod klein;
pub mod lie_equations;
pub mod liealg;
pub mod linalg;
pub mod multiindex;
pub mod poly;
pub mod random;
pub mod scalar;
pub mod spencer;

pub use error::{JetError, Result};
pub use scalar::Scalar;
