//! Two-sided logarithmic bounds on `v`: `v(x) >= -α log|x| - C` everywhere
//! far out, and `v(x) <= (-α + ε) log|x|` beyond some radius `R_ε`.

use serde::Serialize;

use crate::domain::point::norm;
use crate::error::{Error, Result};
use crate::potentials::logpot::LogPotential;

#[derive(Clone, Debug, Serialize)]
pub struct SandwichRow {
    pub radius: f64,
    pub v: f64,
    pub err_est: f64,
    /// `v + α log r`.
    pub offset: f64,
    pub upper_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub alpha: f64,
    pub epsilon: f64,
    pub rows: Vec<SandwichRow>,
    /// `C = -min (v + α log r)` over the sampled radii.
    pub lower_constant: f64,
    /// Smallest sampled radius from which the upper bound holds at every
    /// larger sample.
    pub r_epsilon: Option<f64>,
    /// Lower bound finite and some `R_ε` found.
    pub holds: bool,
}

/// Samples `v` along the direction `dir` at the given radii.
pub fn sandwich_check(lp: &LogPotential<f64>, alpha: f64, epsilon: f64, dir: &[f64], radii: &[f64]) -> Result<SandwichReport> {
    if dir.len() != lp.dim() {
        return Err(Error::DimensionMismatch { expected: lp.dim(), got: dir.len() });
    }
    let nd = norm(dir);
    if !(nd > 0.0) || radii.iter().any(|&r| !(r > 1.0)) || !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("need a nonzero direction, radii > 1 and ε > 0".into()));
    }
    let points: Vec<Vec<f64>> = radii.iter().map(|&r| dir.iter().map(|&d| r * d / nd).collect()).collect();
    let vals = lp.eval_many(&points);
    let mut rows = Vec::with_capacity(radii.len());
    for (&r, v) in radii.iter().zip(vals) {
        let e = v?;
        let lr = r.ln();
        rows.push(SandwichRow {
            radius: r,
            v: e.value,
            err_est: e.err_est,
            offset: e.value + alpha * lr,
            upper_holds: e.value <= (-alpha + epsilon) * lr + e.err_est,
        });
    }
    let lower_constant = -rows.iter().map(|r| r.offset).fold(f64::INFINITY, f64::min);
    let mut r_epsilon = None;
    for row in rows.iter().rev() {
        if row.upper_holds {
            r_epsilon = Some(row.radius);
        } else {
            break;
        }
    }
    let holds = lower_constant.is_finite() && r_epsilon.is_some();
    Ok(SandwichReport { alpha, epsilon, rows, lower_constant, r_epsilon, holds })
}
