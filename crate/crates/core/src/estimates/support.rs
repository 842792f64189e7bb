//! Fractional Laplacians of compactly supported functions, sampled outside
//! the support at a range of distances.

use serde::Serialize;

use crate::domain::field::{ScalarField, Smoothness};
use crate::domain::order::FracOrder;
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::estimates::decay::sample_on_ray;
use crate::estimates::fit::{loglog_fit, DecayReport, EXPONENT_TOLERANCE};

/// Distances at or above this are treated as far field.
pub const FAR_THRESHOLD: f64 = 1.0;

/// Near-field outcome.
#[derive(Clone, Debug, Serialize)]
pub struct NearRegime {
    /// `2s - k - σ_h`; positive means the bound blows up like `δ^{-rate}`.
    pub blowup_rate: f64,
    /// `-slope` of the log-log fit of `|value|` against `δ`.
    pub fitted_rate: f64,
    /// Same, from the two smallest distances only.
    pub local_rate: f64,
    pub max_abs: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportDecayReport {
    pub dim: usize,
    pub s: f64,
    pub holder: (u32, f64),
    pub distances: Vec<f64>,
    pub values: Vec<f64>,
    pub err_ests: Vec<f64>,
    pub far: Option<DecayReport>,
    pub near: Option<NearRegime>,
    pub pass: bool,
}

/// Samples `(-Δ)^s φ` at `c + (R + δ) e_1` for each distance `δ`, where `φ`
/// vanishes outside the declared ball `B(c, R)` and has Hölder class
/// `(k, σ_h)`. Distances of at least [`FAR_THRESHOLD`] are fitted against
/// the rate `n + 2s`; smaller ones against `2s - k - σ_h` when that is
/// positive, otherwise the local rate at the two smallest distances must
/// stay below the exponent tolerance.
pub fn support_decay_check(
    phi: &ScalarField,
    holder: (u32, f64),
    s: f64,
    distances: &[f64],
    spec: &QuadratureSpec,
) -> Result<SupportDecayReport> {
    let (center, radius) = phi
        .support()
        .map(|(c, r)| (c.to_vec(), r))
        .ok_or_else(|| Error::InvalidArgument(format!("field '{}' has no declared support", phi.label())))?;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidOrder(format!("s = {s} must lie in (0, 1)")));
    }
    if distances.is_empty() {
        return Err(Error::InvalidArgument("no sample distances".into()));
    }
    if let Some(d) = distances.iter().find(|d| !(**d > 0.0)) {
        return Err(Error::OutsideDomain(format!("distance {d} to the support must be positive")));
    }
    let n = phi.dim();
    // every sample sits outside the support, where φ is locally smooth
    let field = phi.clone().with_smoothness(Smoothness::C2);
    let radii: Vec<f64> = distances.iter().map(|d| radius + d).collect();
    let (values, err_ests) = sample_on_ray(&field, FracOrder::from_total(s)?, &center, &radii, spec)?;

    let split = |far: bool| -> (Vec<f64>, Vec<f64>) {
        distances
            .iter()
            .zip(&values)
            .filter(|(d, _)| (**d >= FAR_THRESHOLD) == far)
            .map(|(d, v)| (*d, *v))
            .unzip()
    };
    let vanishing = values.iter().all(|v| *v == 0.0);
    let (fd, fv) = split(true);
    let far = if fd.len() >= 2 && !vanishing {
        let fe = vec![0.0; fd.len()];
        Some(DecayReport::from_samples(fd, fv, fe, n as f64 + 2.0 * s, EXPONENT_TOLERANCE)?)
    } else {
        None
    };
    let (nd, nv) = split(false);
    let near = if !nd.is_empty() {
        let rate = 2.0 * s - holder.0 as f64 - holder.1;
        let max_abs = nv.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let (fitted, local) = if nd.len() >= 2 && !vanishing {
            let mut order: Vec<usize> = (0..nd.len()).collect();
            order.sort_by(|&a, &b| nd[a].total_cmp(&nd[b]));
            let (a, b) = (order[0], order[1]);
            let local = -(nv[b].abs() / nv[a].abs()).ln() / (nd[b] / nd[a]).ln();
            (-loglog_fit(&nd, &nv)?.slope, local)
        } else {
            (0.0, 0.0)
        };
        // a bounded limit shows up as a local rate tending to zero
        let pass = if !max_abs.is_finite() {
            false
        } else if rate > 0.0 {
            ((fitted - rate) / rate).abs() <= EXPONENT_TOLERANCE
        } else {
            local <= EXPONENT_TOLERANCE
        };
        Some(NearRegime { blowup_rate: rate, fitted_rate: fitted, local_rate: local, max_abs, pass })
    } else {
        None
    };
    let pass = far.as_ref().map_or(true, |f| f.pass) && near.as_ref().map_or(true, |r| r.pass);
    Ok(SupportDecayReport { dim: n, s, holder, distances: distances.to_vec(), values, err_ests, far, near, pass })
}
