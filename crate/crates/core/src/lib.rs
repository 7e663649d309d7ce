//! Numerical laboratory for weighted quasi-arithmetic and Bajraktarevic means.

pub mod characterize;
pub mod error;
pub mod expr;
pub mod fit;
pub mod generator;
pub mod interval;
pub mod kernels;
pub mod means;
pub mod quad;
pub mod testing;
pub mod tolerances;
pub mod wronskians;

pub use error::{Error, Result};
pub use interval::Interval;
pub use tolerances::Tolerances;
