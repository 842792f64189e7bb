//! Commutation of `(-Δ)^(1/2)` with first derivatives.

use serde::Serialize;

use crate::domain::field::ScalarField;
use crate::domain::order::FracOrder;
use crate::domain::point::Point;
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::fraclap::operator::{frac_lap, FracLapOperator, IntegerLapMode};
use crate::scalar::Real;

/// Step of the central differences on both sides of the commutation check.
pub const COMMUTATION_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CommutationReport<T: Real = f64> {
    /// `(-Δ)^(1/2) ∂_i f (x)` with `∂_i` a central difference.
    pub lap_of_derivative: T,
    /// Central difference of `(-Δ)^(1/2) f` at `x`.
    pub derivative_of_lap: T,
    pub residual: T,
    pub err_est: T,
}

/// `|(-Δ)^(1/2) ∂_i f (x) - ∂_i (-Δ)^(1/2) f (x)|` with both derivatives taken
/// as central differences of step [`COMMUTATION_STEP`].
pub fn commutation_residual<T: Real>(
    f: &ScalarField<T>,
    direction: usize,
    x: &Point<T>,
    spec: &QuadratureSpec,
) -> Result<CommutationReport<T>> {
    let n = f.dim();
    if direction >= n {
        return Err(Error::InvalidArgument(format!("direction {direction} out of range for dimension {n}")));
    }
    x.check_dim(n)?;
    let op = FracLapOperator::new(n, FracOrder::new(0, T::lit(0.5))?, IntegerLapMode::AnalyticDerivatives)?;
    let h = T::lit(COMMUTATION_STEP);
    let df = f.partial_fd(direction, h);
    let lhs = frac_lap(&op, &df, x, spec)?;
    let mut xp = x.coords().to_vec();
    let mut xm = xp.clone();
    xp[direction] = xp[direction] + h;
    xm[direction] = xm[direction] - h;
    let fp = frac_lap(&op, f, &Point::new(xp)?, spec)?;
    let fm = frac_lap(&op, f, &Point::new(xm)?, spec)?;
    let two_h = h + h;
    let rhs = (fp.value - fm.value) / two_h;
    Ok(CommutationReport {
        lap_of_derivative: lhs.value,
        derivative_of_lap: rhs,
        residual: (lhs.value - rhs).abs(),
        err_est: lhs.err_est + (fp.err_est + fm.err_est) / two_h,
    })
}
