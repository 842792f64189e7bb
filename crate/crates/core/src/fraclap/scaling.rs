//! Homogeneity of `(-Δ)^σ` on the power and logarithm fields.

use serde::Serialize;

use crate::domain::field::{DecayHint, ScalarField};
use crate::domain::order::FracOrder;
use crate::domain::point::{norm, Point};
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::fraclap::operator::{frac_lap, FracLapOperator, IntegerLapMode};
use crate::scalar::Real;

/// `|x|^(-j)` for `j >= 1` and `log |x|` for `j = 0`.
pub fn power_field<T: Real>(n: usize, j: u32) -> ScalarField<T> {
    let f = if j == 0 {
        ScalarField::new(n, |x: &[T]| norm(x).ln()).with_decay(DecayHint::LogGrowth).with_label("log|x|")
    } else {
        let p = j as i32;
        ScalarField::new(n, move |x: &[T]| norm(x).powi(-p))
            .with_decay(DecayHint::PowerDecay(T::lit(j as f64)))
            .with_label(format!("|x|^-{j}"))
    };
    f.with_radial_center(&vec![T::zero(); n])
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScalingRow<T: Real = f64> {
    pub radius: T,
    pub value: T,
    pub err_est: T,
    /// `value * r^(j+2σ)`.
    pub scaled: T,
    /// `value(r) / value(1)`.
    pub ratio: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport<T: Real = f64> {
    pub dim: usize,
    pub j: u32,
    pub sigma: T,
    pub rows: Vec<ScalingRow<T>>,
    /// `(max - min) / |value(1)|` of the scaled column.
    pub spread: T,
    /// The value at radius 1 is indistinguishable from zero; all rows are
    /// then compared with zero instead.
    pub zero_mode: bool,
    pub pass: bool,
}

/// Relative spread tolerated by [`scaling_law_check`].
pub const SCALING_TOLERANCE: f64 = 0.02;

/// Evaluates `(-Δ)^σ f_j` at `r e_1` for each radius and at `e_1`, and checks
/// that `value(r) r^(j+2σ)` does not depend on `r`.
pub fn scaling_law_check<T: Real>(n: usize, j: u32, sigma: T, radii: &[T], spec: &QuadratureSpec) -> Result<ScalingReport<T>> {
    if j as usize >= n {
        return Err(Error::InvalidArgument(format!("j = {j} must be below the dimension {n}")));
    }
    if radii.iter().any(|r| !(*r > T::zero())) {
        return Err(Error::InvalidArgument("radii must be positive".into()));
    }
    let op = FracLapOperator::new(n, FracOrder::new(0, sigma)?, IntegerLapMode::AnalyticDerivatives)?;
    let f = power_field::<T>(n, j);
    let expo = T::lit(j as f64) + sigma + sigma;
    // the value at r is O(r^-expo) and vanishes identically when j = n - 2σ,
    // so the absolute target follows that scale
    let eval = |r: T| {
        let floor = spec.rel_tol * r.powf(-expo).as_f64();
        let local = spec.clone().with_abs_tol(spec.abs_tol.max(floor));
        frac_lap(&op, &f, &Point::on_axis(n, 0, r), &local)
    };
    let base = eval(T::one())?;
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let v = if r == T::one() { base } else { eval(r)? };
        let scale = r.powf(expo);
        rows.push(ScalingRow {
            radius: r,
            value: v.value,
            err_est: v.err_est,
            scaled: v.value * scale,
            ratio: v.value / base.value,
        });
    }
    let hi = rows.iter().map(|r| r.scaled).fold(T::neg_infinity(), T::max);
    let lo = rows.iter().map(|r| r.scaled).fold(T::infinity(), T::min);
    let zero_mode = base.value.abs() <= T::lit(3.0) * base.err_est;
    let (spread, pass) = if zero_mode {
        let ok = rows.iter().all(|r| r.value.abs() <= T::lit(3.0) * r.err_est.max(base.err_est));
        (hi - lo, ok)
    } else {
        let s = (hi - lo) / base.value.abs();
        (s, s <= T::lit(SCALING_TOLERANCE))
    };
    Ok(ScalingReport { dim: n, j, sigma, rows, spread, zero_mode, pass })
}
