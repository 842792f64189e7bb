//! Fit-and-compare checks of decay rates and kernel integrals.

pub mod decay;
pub mod fit;
pub mod riesz;
pub mod support;

pub use decay::{moment_decay_check, schwartz_decay_check, MomentDecayReport, MomentFamily, MOMENT_TOLERANCE};
pub use fit::{log_radii, loglog_fit, DecayReport, LogLogFit, EXPONENT_TOLERANCE, MIN_WINDOW_RATIO};
pub use riesz::{riesz_composition_check, RieszDomain, RieszReport, RieszRow, LOG_SLOPE_TOLERANCE};
pub use support::{support_decay_check, NearRegime, SupportDecayReport, FAR_THRESHOLD};
