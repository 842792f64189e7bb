//! The fractional Laplacian as a pointwise operator.

pub mod commute;
pub mod constant;
pub mod operator;
pub mod scaling;

pub use commute::{commutation_residual, CommutationReport};
pub use constant::{constant_integral, normalization_constant};
pub use operator::{fd_neg_laplacian, frac_lap, Estimate, FracLapOperator, IntegerLapMode};
pub use scaling::{power_field, scaling_law_check, ScalingReport, ScalingRow};
