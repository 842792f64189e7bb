//! Numerical toolkit for fractional Laplacians, logarithmic potentials and
//! ball Green's functions in odd dimensions.

pub mod domain;
pub mod cli;
pub mod error;
pub mod estimates;
pub mod fraclap;
pub mod greens;
pub mod potentials;
pub mod quad;
pub mod scalar;
pub mod solutions;

pub use error::{Error, Result};
pub use scalar::Real;
