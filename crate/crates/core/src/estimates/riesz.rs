//! Composition of two Riesz-type kernels,
//! `I(x, y) = ∫_Ω |x - z|^{-p} |y - z|^{-q} dz`.

use serde::{Deserialize, Serialize};

use crate::domain::geom::sphere_area;
use crate::domain::point::{dist, MAX_DIM};
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::quad::adaptive::{dyadic_breaks, AdaptiveOptions};
use crate::quad::polar::{BallPolar, RadialPolar};
use crate::quad::sphere::AngularIntegrator;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RieszDomain {
    FullSpace,
    /// Ball of this radius centered at the origin; `x` and `y` sit
    /// symmetrically about the center.
    Ball { radius: f64 },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RieszRow {
    pub separation: f64,
    pub value: f64,
    pub err_est: f64,
    /// `value |x - y|^{p+q-n}`.
    pub scaled: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RieszReport {
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub domain: RieszDomain,
    pub rows: Vec<RieszRow>,
    /// `max - min` of the scaled column.
    pub spread: f64,
    pub combined_err: f64,
    /// Slope of `value` against `|log |x - y||` (borderline case `p + q = n`).
    pub log_slope: Option<f64>,
    /// `|S^{n-1}|` in the borderline case.
    pub predicted_log_slope: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Relative tolerance on the borderline log slope.
pub const LOG_SLOPE_TOLERANCE: f64 = 0.15;

/// `I` for `x = -d/2 e_1`, `y = d/2 e_1`, by polar quadrature about `x`
/// with the axis pointing at `y`.
fn composition(n: usize, p: f64, q: f64, d: f64, domain: RieszDomain, spec: &QuadratureSpec) -> (f64, f64) {
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    x[0] = -0.5 * d;
    y[0] = 0.5 * d;
    let mut axis = vec![0.0; n];
    axis[0] = 1.0;
    let ang = AngularIntegrator::new(
        &axis,
        true,
        spec.angular_order as usize,
        spec.rel_tol,
        spec.abs_tol * 1e-3,
        spec.angular_budget(),
    );
    let opts = AdaptiveOptions::new(spec.abs_tol, spec.rel_tol, spec.radial_budget());
    let e = n as f64 - 1.0 - p;
    let mut kernel = |rho: f64, _w: &[f64], z: &[f64]| rho.powf(e) * dist(&y, z).powf(-q);
    match domain {
        RieszDomain::FullSpace => {
            let hi = spec.truncation_radius.max(d * 1e3);
            let mut breaks = vec![0.5 * d, d, 2.0 * d];
            breaks.extend(dyadic_breaks(d, hi));
            let engine = RadialPolar {
                angular: &ang,
                origin: &x,
                rho_lo: 0.0,
                rho_hi: hi,
                breaks,
                dyadic: false,
                exclusion: None,
                opts,
            };
            let r = engine.integrate(&mut kernel);
            // beyond hi the integrand is |z|^{-(p+q)} (1 + O(d/|z|))
            let a = p + q - n as f64;
            let tail = sphere_area::<f64>(n as u32 - 1) * hi.powf(-a) / a;
            (r.value + tail, r.err + tail * (4.0 * d / hi))
        }
        RieszDomain::Ball { radius } => {
            let origin = vec![0.0; n];
            let bp = BallPolar {
                angular: &ang,
                x: &x,
                center: &origin,
                radius,
                breaks: vec![0.5 * d, d, 2.0 * d],
                inner_levels: 4,
                radial_opts: opts,
            };
            let r = bp.integrate(&mut kernel);
            (r.value, r.err)
        }
    }
}

/// Evaluates `I` at each separation and checks the scaling law: exact
/// homogeneity `I · |x-y|^{p+q-n} = const` on the full space (spread at most
/// three times the combined error), logarithmic growth with slope
/// `|S^{n-1}|` on a ball when `p + q = n`.
pub fn riesz_composition_check(
    n: usize,
    p: f64,
    q: f64,
    separations: &[f64],
    domain: RieszDomain,
    spec: &QuadratureSpec,
) -> Result<RieszReport> {
    spec.validate()?;
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidDimension(n));
    }
    let nf = n as f64;
    if !(p < nf && q < nf) || p < 0.0 || q < 0.0 {
        return Err(Error::InvalidArgument(format!("exponents p = {p}, q = {q} must lie in [0, {n})")));
    }
    if matches!(domain, RieszDomain::FullSpace) && !(p + q > nf) {
        return Err(Error::InvalidArgument(format!("full-space composition needs p + q > {n}")));
    }
    if let RieszDomain::Ball { radius } = domain {
        if let Some(d) = separations.iter().find(|&&d| !(d > 0.0 && d < 2.0 * radius)) {
            return Err(Error::InvalidArgument(format!("separation {d} does not fit in the ball")));
        }
    }
    if separations.len() < 2 || separations.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidArgument("need at least two positive separations".into()));
    }
    let a = p + q - nf;
    let rows: Vec<RieszRow> = separations
        .iter()
        .map(|&d| {
            let (value, err_est) = composition(n, p, q, d, domain, spec);
            RieszRow { separation: d, value, err_est, scaled: value * d.powf(a) }
        })
        .collect();
    let max = rows.iter().map(|r| r.scaled).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.scaled).fold(f64::INFINITY, f64::min);
    let spread = max - min;
    let combined_err: f64 = rows.iter().map(|r| r.err_est * r.separation.powf(a)).sum();
    let (log_slope, predicted, tolerance, pass) = if a.abs() < 1e-12 {
        let lx: Vec<f64> = rows.iter().map(|r| r.separation.ln().abs()).collect();
        let ly: Vec<f64> = rows.iter().map(|r| r.value).collect();
        let slope = crate::greens::ols_slope(&lx, &ly);
        let pred = sphere_area::<f64>(n as u32 - 1);
        (Some(slope), Some(pred), LOG_SLOPE_TOLERANCE, ((slope - pred) / pred).abs() <= LOG_SLOPE_TOLERANCE)
    } else {
        let ok = match domain {
            RieszDomain::FullSpace => spread <= 3.0 * combined_err,
            // on a ball homogeneity only holds as the separation shrinks
            RieszDomain::Ball { .. } => rows.iter().all(|r| r.value.is_finite()),
        };
        (None, None, 3.0, ok)
    };
    Ok(RieszReport {
        dim: n,
        p,
        q,
        domain,
        rows,
        spread,
        combined_err,
        log_slope,
        predicted_log_slope: predicted,
        tolerance,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_exponents() {
        let spec = QuadratureSpec::default();
        assert!(riesz_composition_check(3, 3.0, 1.0, &[1.0, 2.0], RieszDomain::FullSpace, &spec).is_err());
        assert!(riesz_composition_check(3, 1.0, 1.0, &[1.0, 2.0], RieszDomain::FullSpace, &spec).is_err());
    }
}
