//! Ball kernels: the Laplacian Green's function and its iterates, the Navier
//! boundary representation, and the Poisson kernel and Green's function of
//! the half-Laplacian.

pub mod g1;
pub mod g2;
pub mod kernel;
pub mod navier;
pub mod poisson;

pub use g1::{
    fold_count, g1_bound_ratio, g1_constant, g1_eval, g1_gradient, green_derivative_bound_check, iterated_green,
    iterated_green_directional, laplace_poisson_kernel, ols_slope, GreenDerivativeReport,
};
pub use g2::{
    g2_bound_ratio, g2_calibration, g2_kernel, g2_radial_solution, g2_solve, maximum_principle_check, G2Calibration,
    G2Profile, MaxPrincipleReport,
};
pub use kernel::{BallKernel, BallKernelKind};
pub use navier::{harmonic_extension, navier_representation};
pub use poisson::{halflap_poisson_constant, halflap_poisson_kernel, halflap_poisson_mass, poisson_extension_halflap};
