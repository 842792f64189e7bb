//! Decomposition `u = v + P` at infinity and the growth criteria built on
//! it.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::domain::geom::{factorial, sphere_area};
use crate::domain::point::Point;
use crate::domain::polynomial::{poly_fit, MultiIndex, Polynomial};
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::estimates::fit::{DecayReport, EXPONENT_TOLERANCE};
use crate::greens::ols_slope;
use crate::potentials::LogPotential;
use crate::solutions::fixtures::SolutionField;
use crate::solutions::volume::volume_and_alpha;

/// Half width of the cube `[-w, w]^n` on which `u - v` is fitted.
pub const POLY_GRID_HALF_WIDTH: f64 = 2.0;
/// Largest residual accepted from the polynomial fit of `u - v`.
pub const POLY_FIT_TOLERANCE: f64 = 1e-3;
/// Coefficients below this do not count toward the degree of `P`.
pub const DEGREE_THRESHOLD: f64 = 1e-4;
pub const DEFAULT_FIT_WINDOW: (f64, f64) = (1e2, 1e4);
pub const DEFAULT_FIT_RADII: usize = 12;
/// Radii of the sphere averages of `Δ^j u`, fitted by `a + b/r^2` on the
/// last three.
pub const LAPLACIAN_RADII: [f64; 4] = [12.5, 25.0, 50.0, 100.0];

fn poly_json<S: Serializer>(p: &Polynomial, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.to_json().serialize(s)
}

#[derive(Clone, Debug)]
pub struct AsymptoticOptions {
    pub fit_window: (f64, f64),
    pub fit_radii: usize,
    /// Multi-indices for the derivative decay reports; `None` means every
    /// `1 <= |β| <= n-1`.
    pub derivative_orders: Option<Vec<MultiIndex>>,
}

impl Default for AsymptoticOptions {
    fn default() -> Self {
        Self { fit_window: DEFAULT_FIT_WINDOW, fit_radii: DEFAULT_FIT_RADII, derivative_orders: None }
    }
}

impl AsymptoticOptions {
    fn radii(&self) -> Result<Vec<f64>> {
        let (a, b) = self.fit_window;
        if !(a > 1.0 && b >= 100.0 * a) {
            return Err(Error::InvalidArgument(format!("fit window [{a}, {b}] must start above 1 and span two decades")));
        }
        if self.fit_radii < 3 {
            return Err(Error::InvalidArgument("need at least three fit radii".into()));
        }
        let m = self.fit_radii - 1;
        Ok((0..=m).map(|i| a * (b / a).powf(i as f64 / m as f64)).collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticFit {
    pub alpha_hat: f64,
    pub window: (f64, f64),
    /// Largest `|v/log r + alpha_hat|` over the window.
    pub residual: f64,
    pub alpha_predicted: f64,
    pub radii: Vec<f64>,
    /// Sphere averages of `v`.
    pub averages: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticReport {
    pub label: String,
    #[serde(serialize_with = "poly_json")]
    pub polynomial: Polynomial,
    pub poly_residual: f64,
    pub fit: AsymptoticFit,
    /// Keyed by the multi-index, e.g. `"1,0,0"`.
    pub derivative_decay: BTreeMap<String, DecayReport>,
}

/// `±r e_i`, the sphere sample points.
fn sphere_points(n: usize, r: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut x = vec![0.0; n];
            x[i] = s * r;
            out.push(x);
        }
    }
    out
}

/// `(1, 2, ..., n)/|·|`, a direction along which no derivative of a radial
/// function vanishes identically.
fn generic_direction(n: usize) -> Vec<f64> {
    let norm = ((1..=n).map(|i| (i * i) as f64).sum::<f64>()).sqrt();
    (1..=n).map(|i| i as f64 / norm).collect()
}

/// Sample points of the polynomial fit: a tensor grid on the cube when it
/// has at most 200 points, otherwise seeded uniform points.
fn poly_samples(n: usize, degree: u32, seed: u64) -> Vec<Vec<f64>> {
    let w = POLY_GRID_HALF_WIDTH;
    let per_axis = if n == 1 { 17 } else { (degree as usize + 3).max(5) };
    if per_axis.pow(n as u32) <= 200 {
        let step = 2.0 * w / (per_axis - 1) as f64;
        let total = per_axis.pow(n as u32);
        (0..total)
            .map(|mut k| {
                (0..n)
                    .map(|_| {
                        let i = k % per_axis;
                        k /= per_axis;
                        -w + step * i as f64
                    })
                    .collect()
            })
            .collect()
    } else {
        let count = 4 * MultiIndex::all_up_to(n, degree).len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| (0..n).map(|_| rng.gen_range(-w..=w)).collect()).collect()
    }
}

fn potential(field: &SolutionField, spec: &QuadratureSpec) -> Result<LogPotential> {
    LogPotential::new(field.density.clone(), spec)
}

/// Least-squares fit of `u - v` by a polynomial of degree at most `n-1`.
fn fit_polynomial(field: &SolutionField, lp: &LogPotential, spec: &QuadratureSpec) -> Result<(Polynomial, f64)> {
    let n = field.dim;
    let degree = n as u32 - 1;
    let pts = poly_samples(n, degree, spec.seed);
    let samples: Vec<(Point, f64)> = pts
        .par_iter()
        .map(|x| {
            let v = lp.eval(x)?.value;
            Ok((Point::new(x.clone())?, field.u.eval(x) - v))
        })
        .collect::<Result<_>>()?;
    if samples.iter().any(|(_, d)| !d.is_finite()) {
        return Err(Error::NotIntegrable(format!("u - v is not finite for '{}'", field.label)));
    }
    let fit = poly_fit(&samples, degree)?;
    if fit.max_residual > POLY_FIT_TOLERANCE {
        return Err(Error::FitResidual { residual: fit.max_residual, tol: POLY_FIT_TOLERANCE });
    }
    Ok((fit.poly, fit.max_residual))
}

/// Builds `v` from the field's density, fits `P`, the growth rate of `v`
/// and the decay of its derivatives.
pub fn asymptotic_decomposition(
    field: &SolutionField,
    spec: &QuadratureSpec,
    opts: &AsymptoticOptions,
) -> Result<AsymptoticReport> {
    spec.validate()?;
    let n = field.dim;
    let radii = opts.radii()?;
    let lp = potential(field, spec)?;
    let (polynomial, poly_residual) = fit_polynomial(field, &lp, spec)?;

    let averages: Vec<f64> = radii
        .par_iter()
        .map(|&r| {
            let pts = sphere_points(n, r);
            let mut s = 0.0;
            for x in &pts {
                s += lp.eval(x)?.value;
            }
            Ok(s / pts.len() as f64)
        })
        .collect::<Result<_>>()?;
    let logs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let alpha_hat = -ols_slope(&logs, &averages);
    let residual = averages.iter().zip(&logs).map(|(v, l)| (v / l + alpha_hat).abs()).fold(0.0, f64::max);
    let alpha_predicted = if field.is_solution {
        volume_and_alpha(field, spec)?.alpha
    } else {
        // the rate of v for a general density: ‖f‖/γ_n
        let gamma = factorial::<f64>(n as u32 - 1) * sphere_area::<f64>(n as u32) / 2.0;
        lp.mass().value / gamma
    };
    let fit = AsymptoticFit {
        alpha_hat,
        window: opts.fit_window,
        residual,
        alpha_predicted,
        radii: radii.clone(),
        averages,
    };

    let orders = match &opts.derivative_orders {
        Some(o) => o.clone(),
        None => MultiIndex::all_up_to(n, n as u32 - 1).into_iter().filter(|a| a.degree() >= 1).collect(),
    };
    let dir = generic_direction(n);
    let mut derivative_decay = BTreeMap::new();
    if lp.mass().value != 0.0 {
        for beta in orders {
            let rows: Vec<(f64, f64)> = radii
                .par_iter()
                .map(|&r| {
                    let x: Vec<f64> = dir.iter().map(|d| d * r).collect();
                    lp.derivative(&x, &beta, spec).map(|e| (e.value, e.err_est))
                })
                .collect::<Result<_>>()?;
            let (values, errs): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
            let rep = DecayReport::from_samples(radii.clone(), values, errs, beta.degree() as f64, EXPONENT_TOLERANCE)?;
            derivative_decay.insert(beta.to_key(), rep);
        }
    }
    Ok(AsymptoticReport { label: field.label.clone(), polynomial, poly_residual, fit, derivative_decay })
}

#[derive(Clone, Debug, Serialize)]
pub struct LaplacianLimit {
    pub j: u32,
    pub radii: Vec<f64>,
    /// Sphere averages of `Δ^j u`.
    pub averages: Vec<f64>,
    /// `a` in the fit `a + b/r^2` on the last three radii.
    pub limit: f64,
    pub rate_coefficient: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthCriteria {
    pub label: String,
    pub deg_p: u32,
    #[serde(serialize_with = "poly_json")]
    pub polynomial: Polynomial,
    /// Largest `|u|/|x|^2` on the outermost sphere.
    pub sup_quadratic_ratio: f64,
    /// `(r, max |u|/r^2)` on each sphere of the fit window.
    pub quadratic_ratios: Vec<(f64, f64)>,
    /// `(r, mean u)` on each sphere of the fit window.
    pub u_trend: Vec<(f64, f64)>,
    pub laplacian_limits: Vec<LaplacianLimit>,
}

/// `a + b/r^2` through the last three points, least squares.
fn extrapolate(radii: &[f64], values: &[f64]) -> (f64, f64) {
    let k = radii.len();
    let (r, v) = (&radii[k - 3..], &values[k - 3..]);
    let t: Vec<f64> = r.iter().map(|r| r.powi(-2)).collect();
    let b = ols_slope(&t, v);
    let a = v.iter().zip(&t).map(|(v, t)| v - b * t).sum::<f64>() / 3.0;
    (a, b)
}

/// Degree of `P`, growth of `u` relative to `|x|^2`, and the limits of
/// `Δ^j u` for `1 <= j <= (n-1)/2` from sphere averages.
pub fn growth_criteria(field: &SolutionField, spec: &QuadratureSpec, opts: &AsymptoticOptions) -> Result<GrowthCriteria> {
    spec.validate()?;
    let n = field.dim;
    let radii = opts.radii()?;
    let lp = potential(field, spec)?;
    let (polynomial, _) = fit_polynomial(field, &lp, spec)?;
    let deg_p = polynomial.degree_above(DEGREE_THRESHOLD);

    let mut quadratic_ratios = Vec::with_capacity(radii.len());
    let mut u_trend = Vec::with_capacity(radii.len());
    for &r in &radii {
        let vals: Vec<f64> = sphere_points(n, r).par_iter().map(|x| field.u.eval(x)).collect();
        let ratio = vals.iter().map(|v| v.abs() / (r * r)).fold(0.0, f64::max);
        quadratic_ratios.push((r, ratio));
        u_trend.push((r, vals.iter().sum::<f64>() / vals.len() as f64));
    }
    let sup_quadratic_ratio = quadratic_ratios.last().map_or(0.0, |q| q.1);

    let mut laplacian_limits = Vec::new();
    for j in 1..=((n as u32 - 1) / 2) {
        let lap = field
            .u
            .neg_laplacian_power(j)
            .ok_or_else(|| Error::InvalidArgument(format!("'{}' has no registered (-Δ)^{j} closure", field.label)))?;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let averages: Vec<f64> = LAPLACIAN_RADII
            .iter()
            .map(|&r| {
                let pts = sphere_points(n, r);
                let s: f64 = pts.par_iter().map(|x| lap.eval(x)).sum();
                sign * s / pts.len() as f64
            })
            .collect();
        if averages.iter().any(|a| !a.is_finite()) {
            return Err(Error::NotIntegrable(format!("Δ^{j} u is not finite on the sample spheres")));
        }
        let (limit, rate_coefficient) = extrapolate(&LAPLACIAN_RADII, &averages);
        laplacian_limits.push(LaplacianLimit { j, radii: LAPLACIAN_RADII.to_vec(), averages, limit, rate_coefficient });
    }
    Ok(GrowthCriteria {
        label: field.label.clone(),
        deg_p,
        polynomial,
        sup_quadratic_ratio,
        quadratic_ratios,
        u_trend,
        laplacian_limits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrapolation_is_exact_on_the_model() {
        let r = [10.0, 20.0, 40.0, 80.0];
        let v: Vec<f64> = r.iter().map(|r| -6.0 + 3.0 / (r * r)).collect();
        let (a, b) = extrapolate(&r, &v);
        assert!((a + 6.0).abs() < 1e-12 && (b - 3.0).abs() < 1e-9);
    }

    #[test]
    fn sample_layouts() {
        assert_eq!(poly_samples(1, 0, 0).len(), 17);
        assert_eq!(poly_samples(3, 2, 0).len(), 125);
        assert_eq!(poly_samples(5, 4, 7).len(), 4 * 126);
        assert_eq!(sphere_points(3, 2.0).len(), 6);
        let d = generic_direction(3);
        assert!((d.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn windows_must_span_two_decades() {
        let o = AsymptoticOptions { fit_window: (10.0, 500.0), ..Default::default() };
        assert!(o.radii().is_err());
        assert_eq!(AsymptoticOptions::default().radii().unwrap().len(), 12);
    }
}
