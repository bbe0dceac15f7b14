//! Estimators of quadratic density functionals `q_{k,l} = ∫ p_X^k p_Y^l`
//! from stationary m-dependent samples, based on counting ε-close pairs.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bandwidth;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod montecarlo;
pub mod oracle;
pub mod pairs;
pub mod processes;
pub mod rng;
pub mod sample;

pub use error::{Error, Result};
pub use sample::Sample;
