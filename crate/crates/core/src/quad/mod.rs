//! Quadrature engines.

pub mod adaptive;
pub mod gauss;
pub mod mc;
pub mod polar;
pub mod pv;
pub mod sphere;
pub mod tail;
pub mod volume;

pub use adaptive::{integrate, AdaptiveOptions, Quad1d};
pub use mc::{nested_mc_integral, McResult, PairKernel};
pub use pv::{pv_integral, PvIntegrand, PvResult, TailSource};
pub use sphere::{AngularIntegrator, SphereRule};
pub use tail::{TailBound, TailMethod};
pub use volume::{truncated_integral, Domain, IntegralResult};
