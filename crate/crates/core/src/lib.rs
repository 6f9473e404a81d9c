//! Numerical laboratory for a time-fractional semilinear equation driven by
//! a non-Gaussian (anisotropic stable-type) spatial operator.

// `!(x > 0.0)` is used on purpose so that NaN lands in the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod quad;
pub mod specfun;
pub mod symbol;
pub mod grid;
pub mod kernels;
pub mod osgood;
pub mod regimes;
pub mod solver;
pub mod config;
pub mod checks;

pub use error::{Error, Result};
