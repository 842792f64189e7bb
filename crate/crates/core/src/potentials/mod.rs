//! Logarithmic potentials, fundamental solutions and exponential
//! integrability.

pub mod brezis_merle;
pub mod builtin;
pub mod fundamental;
pub mod kernel;
pub mod logpot;
pub mod profile;
pub mod sandwich;

pub use brezis_merle::{
    bm_refinement, bm_sweep, decide, exp_integrability_bound, jensen_bound, BmSweep, ConcentrationFamily, Decision,
    ExpIntegrability, RefinementLevel,
};
pub use builtin::DensitySpec;
pub use fundamental::{fundamental_convolve, FundamentalSolution, KernelKind};
pub use kernel::LogKernelDerivative;
pub use logpot::{log_potential_derivative, log_potential_eval, weighted_norm_check, LogPotential, WeightedNormReport};
pub use profile::RadialProfile;
pub use sandwich::{sandwich_check, SandwichReport, SandwichRow};
