//! Green's function of the half-Laplacian on a ball,
//! `G_2(x, y) = C_n |x-y|^{1-n} F_n(r_0)` with
//! `F_n(z) = ∫_0^z t^{-1/2} (1+t)^{-n/2} dt` and
//! `r_0 = (r^2-|x|^2)(r^2-|y|^2)/(r^2 |x-y|^2)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::field::{DecayHint, ScalarField, Smoothness};
use crate::domain::order::FracOrder;
use crate::domain::point::{dist, dot, norm, Point, MAX_DIM};
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::fraclap::{frac_lap, Estimate, FracLapOperator, IntegerLapMode};
use crate::greens::g1::check_inside;
use crate::quad::adaptive::{integrate, AdaptiveOptions};
use crate::quad::gauss::gauss_legendre;
use crate::quad::polar::ball_exit;
use crate::quad::sphere::AngularIntegrator;

/// Tabulation window of `log z`.
pub const LOG_Z_MIN: f64 = -30.0;
pub const LOG_Z_MAX: f64 = 30.0;
const LOG_STEP: f64 = 0.025;

/// `F_n` tabulated on a uniform grid in `log z` and interpolated by cubic
/// Hermite polynomials using the exact derivative.
#[derive(Clone, Debug)]
pub struct G2Profile {
    n: usize,
    values: Vec<f64>,
}

impl G2Profile {
    pub fn new(n: usize) -> Self {
        let cells = ((LOG_Z_MAX - LOG_Z_MIN) / LOG_STEP).round() as usize;
        let (gx, gw) = gauss_legendre::<f64>(8);
        let z0 = LOG_Z_MIN.exp();
        let mut values = Vec::with_capacity(cells + 1);
        let mut acc = 2.0 * z0.sqrt() * (1.0 - n as f64 * z0 / 6.0);
        values.push(acc);
        for k in 0..cells {
            let a = LOG_Z_MIN + k as f64 * LOG_STEP;
            let cell: f64 = gx
                .iter()
                .zip(&gw)
                .map(|(t, w)| w * Self::slope(n, a + 0.5 * LOG_STEP * (t + 1.0)))
                .sum();
            acc += 0.5 * LOG_STEP * cell;
            values.push(acc);
        }
        Self { n, values }
    }

    /// Shared instance per dimension.
    pub fn cached(n: usize) -> Arc<G2Profile> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<G2Profile>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        cache.lock().unwrap().entry(n).or_insert_with(|| Arc::new(G2Profile::new(n))).clone()
    }

    /// `dF/d(log z) = z^{1/2} (1+z)^{-n/2}`.
    fn slope(n: usize, u: f64) -> f64 {
        let z = u.exp();
        (0.5 * u - 0.5 * n as f64 * z.ln_1p()).exp()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn eval(&self, z: f64) -> f64 {
        if !(z > 0.0) {
            return 0.0;
        }
        let u = z.ln();
        let n = self.n as f64;
        if u <= LOG_Z_MIN {
            return 2.0 * z.sqrt() * (1.0 - n * z / 6.0);
        }
        let last = *self.values.last().unwrap();
        if u >= LOG_Z_MAX {
            let z1 = LOG_Z_MAX.exp();
            if self.n == 1 {
                return last + 2.0 * ((z.sqrt() + (1.0 + z).sqrt()).ln() - (z1.sqrt() + (1.0 + z1).sqrt()).ln());
            }
            let e = 0.5 * (1.0 - n);
            return last + 2.0 / (n - 1.0) * (z1.powf(e) - z.powf(e));
        }
        let s = (u - LOG_Z_MIN) / LOG_STEP;
        let k = (s.floor() as usize).min(self.values.len() - 2);
        let t = s - k as f64;
        let a = LOG_Z_MIN + k as f64 * LOG_STEP;
        let (f0, f1) = (self.values[k], self.values[k + 1]);
        let d0 = Self::slope(self.n, a) * LOG_STEP;
        let d1 = Self::slope(self.n, a + LOG_STEP) * LOG_STEP;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * f0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * f1 + (t3 - t2) * d1
    }

    /// `F_n(∞) = B(1/2, (n-1)/2)` for `n >= 3`, infinite for `n = 1`.
    pub fn limit(&self) -> f64 {
        if self.n == 1 {
            return f64::INFINITY;
        }
        let z1 = LOG_Z_MAX.exp();
        let n = self.n as f64;
        *self.values.last().unwrap() + 2.0 / (n - 1.0) * z1.powf(0.5 * (1.0 - n))
    }
}

/// `|x-y|^{1-n} F_n(r_0)` without the normalizer.
pub fn g2_shape(profile: &G2Profile, r: f64, x: &[f64], y: &[f64]) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    let r2 = r * r;
    let r0 = (r2 - dot(x, x)) * (r2 - dot(y, y)) / (r2 * d2);
    d2.powf(0.5 * (1.0 - x.len() as f64)) * profile.eval(r0)
}

/// `∫_{B_r} |x-y|^{1-n} F_n(r_0) rhs(y) dy` by polar quadrature about `x`;
/// the radial variable `ρ = ρ_b (1 - τ^2)` smooths the square-root decay of
/// `F_n` at the sphere.
fn unnormalized(r: f64, rhs: &ScalarField, x: &[f64], spec: &QuadratureSpec) -> Estimate {
    let n = x.len();
    let profile = G2Profile::cached(n);
    let m = norm(x);
    let mut axis = vec![0.0; n];
    if m > 0.0 {
        for i in 0..n {
            axis[i] = x[i] / m;
        }
    } else {
        axis[0] = 1.0;
    }
    let radial = rhs.radial_center().is_some_and(|c| norm(c) == 0.0);
    let ang = AngularIntegrator::new(
        &axis,
        radial,
        spec.angular_order as usize,
        spec.rel_tol,
        spec.abs_tol * 1e-3,
        spec.angular_budget(),
    );
    let origin = vec![0.0; n];
    let opts = AdaptiveOptions::new(spec.abs_tol, spec.rel_tol, spec.radial_budget());
    // n = 1 has a logarithmic singularity at y = x
    let levels = if n == 1 { 40 } else { 8 };
    let mut breaks = vec![0.0, 0.5];
    breaks.extend((1..=levels).map(|k| 1.0 - 0.5f64.powi(k)));
    breaks.push(1.0);
    let sx = r * r - m * m;
    let mut y = [0.0; MAX_DIM];
    let res = ang.integrate_with_err(
        &mut |w: &[f64]| {
            let rb = ball_exit(x, &origin, r, w);
            if rb <= 0.0 {
                return (0.0, 0.0);
            }
            let xw = dot(x, w);
            let mut g = |tau: f64| -> (f64, f64) {
                let rho = rb * (1.0 - tau * tau);
                if rho <= 0.0 {
                    return (0.0, 0.0);
                }
                for i in 0..n {
                    y[i] = x[i] + rho * w[i];
                }
                // r^2 - |y|^2 = (ρ_b - ρ)(ρ + ρ_b + 2 x·w) without cancellation
                let sy = rb * tau * tau * (rho + rb + 2.0 * xw);
                let f = profile.eval(sx * sy / (r * r * rho * rho));
                (2.0 * rb * tau * f * rhs.eval(&y[..n]), 0.0)
            };
            let q = integrate(&mut g, &breaks, opts);
            (q.value, q.err)
        },
        0.0,
    );
    Estimate { value: res.value, err_est: res.err }
}

fn calibration_spec() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-11).with_abs_tol(1e-14)
}

/// Chebyshev nodes in `u = |x|^2 / r^2` used by radial solution fields.
pub const RADIAL_NODES: usize = 12;

/// `h(x) = sqrt(r^2 - |x|^2)_+ q(|x|^2 / r^2)` with `q` a Chebyshev
/// interpolant of `h / sqrt(r^2 - |x|^2)` sampled from a radial solver.
fn radial_field<G>(n: usize, r: f64, nodes: usize, solve: G) -> Result<ScalarField>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    let theta: Vec<f64> = (0..nodes).map(|k| PI * (k as f64 + 0.5) / nodes as f64).collect();
    let samples: Vec<f64> = theta
        .par_iter()
        .map(|&th| {
            let u = 0.5 * (1.0 + th.cos());
            let rho = r * u.sqrt();
            solve(rho).map(|h| h / (r * r - rho * rho).sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    let coeffs: Vec<f64> = (0..nodes)
        .map(|j| {
            let s: f64 = samples.iter().zip(&theta).map(|(v, th)| v * (j as f64 * th).cos()).sum();
            let c = 2.0 * s / nodes as f64;
            if j == 0 {
                0.5 * c
            } else {
                c
            }
        })
        .collect();
    let origin = vec![0.0; n];
    Ok(ScalarField::new(n, move |x: &[f64]| {
        let s = r * r - dot(x, x);
        if s <= 0.0 {
            return 0.0;
        }
        let tau = 2.0 * dot(x, x) / (r * r) - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * tau * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        s.sqrt() * (tau * b1 - b2 + coeffs[0])
    })
    .with_radial_center(&origin)
    .with_support(&origin, r)
    .with_decay(DecayHint::Schwartz)
    // only interior points are ever evaluated; the boundary kink sits on a
    // quadrature break
    .with_smoothness(Smoothness::C2)
    .with_label("g2-solution"))
}

/// Normalizer record of `G_2`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct G2Calibration {
    pub dim: usize,
    pub constant: f64,
    /// `(-Δ)^{1/2}` of the unnormalized torsion function at the center.
    pub center_residual: f64,
    pub residual_err: f64,
}

/// Calibrates `C_n` so that the solution with `rhs ≡ 1` on the unit ball
/// has half-Laplacian 1 at the center. `G_2` is scale covariant, so the
/// constant is shared by all radii.
pub fn g2_calibration(n: usize) -> Result<G2Calibration> {
    static CACHE: OnceLock<Mutex<HashMap<usize, G2Calibration>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&n) {
        return Ok(*c);
    }
    let spec = calibration_spec();
    let one = ScalarField::constant(n, 1.0);
    let h = radial_field(n, 1.0, RADIAL_NODES, |rho| {
        let mut x = vec![0.0; n];
        x[0] = rho;
        Ok(unnormalized(1.0, &one, &x, &spec).value)
    })?;
    let op = FracLapOperator::new(n, FracOrder::new(0, 0.5)?, IntegerLapMode::AnalyticDerivatives)?;
    let res = frac_lap(&op, &h, &Point::origin(n), &spec)?;
    let cal = G2Calibration { dim: n, constant: 1.0 / res.value, center_residual: res.value, residual_err: res.err_est };
    cache.lock().unwrap().insert(n, cal);
    Ok(cal)
}

/// `G_2(x, y)` on `B_r(0)`.
pub fn g2_kernel(r: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    check_inside(r, x, "x")?;
    check_inside(r, y, "y")?;
    if dist(x, y) == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let c = g2_calibration(x.len())?.constant;
    Ok(c * g2_shape(&G2Profile::cached(x.len()), r, x, y))
}

fn check_rhs(rhs: &ScalarField, n: usize) -> Result<()> {
    if rhs.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rhs.dim() });
    }
    Ok(())
}

/// `h_1(x) = ∫_{B_r} G_2(x, y) rhs(y) dy`, the solution of
/// `(-Δ)^{1/2} h_1 = rhs` in `B_r` vanishing outside.
pub fn g2_solve(r: f64, rhs: &ScalarField, x: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    let n = x.len();
    check_rhs(rhs, n)?;
    check_inside(r, x, "x")?;
    let c = g2_calibration(n)?.constant;
    let e = unnormalized(r, rhs, x, spec);
    if !e.value.is_finite() {
        return Err(Error::NotIntegrable(format!("right-hand side '{}' on B_{r}", rhs.label())));
    }
    Ok(Estimate { value: c * e.value, err_est: c * e.err_est })
}

/// The solution for a right-hand side radial about the origin as a field
/// (zero outside the ball), suitable for residual checks with `frac_lap`.
pub fn g2_radial_solution(r: f64, rhs: &ScalarField, nodes: usize, spec: &QuadratureSpec) -> Result<ScalarField> {
    let n = rhs.dim();
    if !rhs.radial_center().is_some_and(|c| norm(c) == 0.0) {
        return Err(Error::InvalidArgument("radial solution needs a right-hand side radial about the origin".into()));
    }
    radial_field(n, r, nodes, |rho| {
        let mut x = vec![0.0; n];
        x[0] = rho;
        g2_solve(r, rhs, &x, spec).map(|e| e.value)
    })
}

/// Largest sampled `|G_2(x, y)| |x - y|^{n-1}`; bounded by `C_n F_n(∞)`
/// for `n >= 3`.
pub fn g2_bound_ratio(r: f64, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (x, y) in pairs {
        let g = g2_kernel(r, x, y)?;
        worst = worst.max(g.abs() * dist(x, y).powi(x.len() as i32 - 1));
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxPrincipleReport {
    pub dim: usize,
    pub radius: f64,
    pub samples: usize,
    /// Smallest `h_1 + err_est` seen.
    pub min_margin: f64,
    pub min_value: f64,
    pub violations: usize,
    pub pass: bool,
}

/// Random nonnegative right-hand side: a sum of up to three Gaussian bumps
/// with centers in the ball.
fn random_rhs(n: usize, r: f64, rng: &mut ChaCha8Rng) -> ScalarField {
    let k = rng.gen_range(1..=3);
    let bumps: Vec<(Vec<f64>, f64, f64)> = (0..k)
        .map(|_| {
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5) * r).collect();
            (c, rng.gen_range(1.0..10.0) / (r * r), rng.gen_range(0.0..2.0))
        })
        .collect();
    ScalarField::new(n, move |y: &[f64]| {
        bumps.iter().map(|(c, a, m)| m * (-a * dist(y, c).powi(2)).exp()).sum()
    })
    .with_decay(DecayHint::Schwartz)
    .with_label("random-bumps")
}

fn random_point(n: usize, r: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0) * r).collect();
        if norm(&p) < 0.95 * r {
            return p;
        }
    }
}

/// Solves with `samples` random nonnegative right-hand sides at random
/// interior points and checks `h_1 >= -err_est`. Each sample has its own
/// generator stream, so the result does not depend on the thread count.
pub fn maximum_principle_check(n: usize, r: f64, samples: usize, spec: &QuadratureSpec) -> Result<MaxPrincipleReport> {
    let rows: Vec<Estimate> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64);
            let rhs = random_rhs(n, r, &mut rng);
            let x = random_point(n, r, &mut rng);
            g2_solve(r, &rhs, &x, spec)
        })
        .collect::<Result<Vec<_>>>()?;
    let min_margin = rows.iter().map(|e| e.value + e.err_est).fold(f64::INFINITY, f64::min);
    let min_value = rows.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
    let violations = rows.iter().filter(|e| e.value + e.err_est < 0.0).count();
    Ok(MaxPrincipleReport { dim: n, radius: r, samples, min_margin, min_value, violations, pass: violations == 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_matches_closed_forms() {
        let p1 = G2Profile::new(1);
        let p3 = G2Profile::new(3);
        let p5 = G2Profile::new(5);
        for &z in &[1e-20f64, 1e-6, 0.3, 1.0, 7.5, 1e4, 1e12, 1e20] {
            let s = (z / (1.0 + z)).sqrt();
            let f1 = 2.0 * z.sqrt().asinh();
            let f3 = 2.0 * s;
            let f5 = 2.0 * (s - s * s * s / 3.0);
            assert!((p1.eval(z) - f1).abs() < 1e-9 * (1.0 + f1), "z={z}: {} {f1}", p1.eval(z));
            assert!((p3.eval(z) - f3).abs() < 1e-9 * f3, "z={z}");
            assert!((p5.eval(z) - f5).abs() < 1e-9 * f5, "z={z}");
        }
        assert!((p3.limit() - 2.0).abs() < 1e-9);
        assert!((p5.limit() - 4.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn zero_rhs() {
        let v = g2_solve(1.0, &ScalarField::zero(1), &[0.2], &QuadratureSpec::default()).unwrap();
        assert_eq!(v.value, 0.0);
    }
}
