//! Executable checks on explicit and synthetic solution fields.

pub mod asymptotics;
pub mod fixtures;
pub mod residual;
pub mod spherical;
pub mod volume;

pub use asymptotics::{
    asymptotic_decomposition, growth_criteria, AsymptoticFit, AsymptoticOptions, AsymptoticReport, GrowthCriteria,
    LaplacianLimit, DEGREE_THRESHOLD, LAPLACIAN_RADII,
};
pub use fixtures::{FixtureSpec, PolyTerm, SolutionField};
pub use residual::{pde_residual, ResidualRow};
pub use spherical::SphericalSolution;
pub use volume::{volume_and_alpha, VolumeAlpha};
