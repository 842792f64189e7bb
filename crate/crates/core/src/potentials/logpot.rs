//! The logarithmic potential `v(x) = (1/γ_n) ∫ log((1+|y|)/|x-y|) f(y) dy`
//! and its derivatives.

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::field::{DecayHint, ScalarField, Smoothness};
use crate::domain::geom::{geom_constants, sphere_area};
use crate::domain::point::{dist, dot, norm, Point, MAX_DIM};
use crate::domain::polynomial::MultiIndex;
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::fraclap::Estimate;
use crate::quad::adaptive::{dyadic_breaks, AdaptiveOptions, Quad1d};
use crate::quad::polar::{core_estimate, Exclusion, RadialPolar};
use crate::quad::pv::BUDGET_SLACK;
use crate::quad::sphere::AngularIntegrator;
use crate::quad::tail::volume_tail;
use crate::quad::volume::{truncated_integral, Domain};
use crate::potentials::kernel::LogKernelDerivative;
use crate::scalar::Real;

/// Log-potential of an integrable density. The density mass is certified
/// (integral with a tail bound) at construction.
#[derive(Clone, Debug)]
pub struct LogPotential<T: Real = f64> {
    density: ScalarField<T>,
    dim: usize,
    gamma_n: T,
    spec: QuadratureSpec,
    mass: Estimate<T>,
}

impl<T: Real> LogPotential<T> {
    pub fn new(density: ScalarField<T>, spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let dim = density.dim();
        let gamma_n = geom_constants::<T>(dim)?.gamma_n;
        let q = truncated_integral(&density, &Domain::FullSpace, spec)?;
        let mass = Estimate { value: q.value, err_est: q.err_est };
        Ok(Self { density, dim, gamma_n, spec: spec.clone(), mass })
    }

    pub fn density(&self) -> &ScalarField<T> {
        &self.density
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma_n(&self) -> T {
        self.gamma_n
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    /// `∫ f` with its error estimate.
    pub fn mass(&self) -> Estimate<T> {
        self.mass
    }

    pub fn eval(&self, x: &[T]) -> Result<Estimate<T>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        potential_at(self, x, None, &self.spec)
    }

    /// `D^α v(x)` for `0 < |α| <= n-1` (`α = 0` gives the value).
    pub fn derivative(&self, x: &[T], alpha: &MultiIndex, spec: &QuadratureSpec) -> Result<Estimate<T>> {
        if x.len() != self.dim || alpha.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len().min(alpha.dim()) });
        }
        spec.validate()?;
        let k = alpha.degree() as usize;
        if k == 0 {
            return potential_at(self, x, None, spec);
        }
        if k >= self.dim {
            return Err(Error::InvalidArgument(format!(
                "derivative of order {k} of the log kernel is not locally integrable in dimension {}",
                self.dim
            )));
        }
        let kern = LogKernelDerivative::new(alpha);
        potential_at(self, x, Some(&kern), spec)
    }

    /// Values at many points, evaluated in parallel; output order follows
    /// input order.
    pub fn eval_many(&self, points: &[Vec<T>]) -> Vec<Result<Estimate<T>>> {
        points.par_iter().map(|p| self.eval(p)).collect()
    }

    /// `v` as a field (NaN where the evaluation fails).
    pub fn to_field(&self) -> ScalarField<T> {
        let lp = self.clone();
        let mut f = ScalarField::new(self.dim, move |x: &[T]| lp.eval(x).map(|e| e.value).unwrap_or_else(|_| T::nan()))
            .with_decay(DecayHint::LogGrowth)
            .with_smoothness(Smoothness::C2)
            .with_label(format!("logpot({})", self.density.label()));
        if let Some(c) = self.density.radial_center() {
            f = f.with_radial_center(&c.to_vec());
        }
        f
    }
}

pub fn log_potential_eval<T: Real>(lp: &LogPotential<T>, x: &Point<T>) -> Result<Estimate<T>> {
    lp.eval(x.coords())
}

pub fn log_potential_derivative<T: Real>(
    lp: &LogPotential<T>,
    x: &Point<T>,
    alpha: &MultiIndex,
    spec: &QuadratureSpec,
) -> Result<Estimate<T>> {
    lp.derivative(x.coords(), alpha, spec)
}

/// Whether `a`, `b` and the origin lie on one line.
fn collinear_with_origin<T: Real>(x: &[T], c: &[T]) -> bool {
    let a: Vec<T> = x.iter().zip(c).map(|(&xi, &ci)| xi - ci).collect();
    let b: Vec<T> = c.iter().map(|&ci| -ci).collect();
    let (aa, bb, ab) = (dot(&a, &a), dot(&b, &b), dot(&a, &b));
    aa == T::zero() || bb == T::zero() || aa * bb - ab * ab <= T::lit(1e-24) * aa * bb
}

fn check_budget<T: Real>(q: &Quad1d<T>, spec: &QuadratureSpec) -> Result<()> {
    let target = T::lit(spec.abs_tol).max(T::lit(spec.rel_tol) * q.value.abs());
    if !q.converged && q.err > T::lit(BUDGET_SLACK) * target {
        return Err(Error::BudgetExhausted { err: q.err.as_f64(), target: target.as_f64() });
    }
    Ok(())
}

fn potential_at<T: Real>(
    lp: &LogPotential<T>,
    x: &[T],
    kern: Option<&LogKernelDerivative<T>>,
    spec: &QuadratureSpec,
) -> Result<Estimate<T>> {
    let n = lp.dim;
    let f = &lp.density;
    let two = T::lit(2.0);
    let c0: Vec<T> = f.center_hint().map(|c| c.to_vec()).unwrap_or_else(|| vec![T::zero(); n]);
    let d = dist(x, &c0);
    let mut axis = vec![T::zero(); n];
    if d > T::zero() {
        for i in 0..n {
            axis[i] = (x[i] - c0[i]) / d;
        }
    } else if norm(&c0) > T::zero() {
        let nc = norm(&c0);
        for i in 0..n {
            axis[i] = -c0[i] / nc;
        }
    } else {
        axis[0] = T::one();
    }
    let radial = f.radial_center().is_some_and(|c| dist(c, &c0) == T::zero());
    let axisym = kern.is_none() && radial && collinear_with_origin(x, &c0);
    let rel = T::lit(spec.rel_tol);
    let abs = T::lit(spec.abs_tol);
    let opts = AdaptiveOptions::new(abs, rel, spec.radial_budget());
    let order = spec.angular_order as usize;
    let support = f.support().map(|(c, s)| (dist(x, c), dist(&c0, c), s));
    let xnorm = norm(x);
    // kernel as a function of z = x - y
    let kern_at = |y: &[T], z: &[T]| -> T {
        match kern {
            None => (T::one() + norm(y)).ln() - norm(z).ln(),
            Some(k) => -k.eval(z),
        }
    };
    let pow = |rho: T| rho.powi(n as i32 - 1);
    // sphere integrals below this contribute nothing visible at abs_tol
    let ang_abs = abs * T::lit(1e-3);

    // inside B_1(x): polar about x on dyadic shells
    let mut near = Estimate { value: T::zero(), err_est: T::zero() };
    if support.is_none_or(|(dx, _, s)| dx - s < T::one()) {
        let neg_axis: Vec<T> = axis.iter().map(|&a| -a).collect();
        let angular = AngularIntegrator::new(&neg_axis, axisym, order, rel * T::lit(0.1), ang_abs, spec.angular_budget());
        // the log kernel needs deep shells; derivative kernels are handled
        // by the core estimate below 2^-30, where differences of f are
        // dominated by rounding
        let depth = if kern.is_some() { spec.max_subdivisions.min(30) } else { spec.max_subdivisions.min(60) };
        let rho0 = T::lit(0.5f64.powi(depth as i32));
        let mut breaks = vec![xnorm, d];
        if let Some((dx, _, s)) = support {
            breaks.extend([dx - s, dx + s, s - dx]);
        }
        breaks.retain(|&b| b > rho0 && b < T::one());
        let engine = RadialPolar {
            angular: &angular,
            origin: x,
            rho_lo: rho0,
            rho_hi: T::one(),
            breaks,
            dyadic: true,
            exclusion: None,
            opts,
        };
        // derivative kernels have parity (-1)^|α|; pairing antipodal points
        // removes the cancellation of the leading term on each sphere
        let parity = kern.map(|k| if k.order() % 2 == 0 { T::one() } else { -T::one() });
        // z = -ρω exactly; forming x - y would lose digits at small ρ
        let mut g = |rho: T, w: &[T], y: &[T]| {
            let mut z = [T::zero(); MAX_DIM];
            for i in 0..n {
                z[i] = -rho * w[i];
            }
            let k = kern_at(y, &z[..n]);
            match parity {
                None => pow(rho) * k * f.eval(y),
                Some(sgn) => {
                    let mut ym = [T::zero(); MAX_DIM];
                    for i in 0..n {
                        ym[i] = x[i] - rho * w[i];
                    }
                    pow(rho) * k * (f.eval(y) + sgn * f.eval(&ym[..n])) / two
                }
            }
        };
        let q = engine.integrate(&mut g);
        check_budget(&q, spec)?;
        let g0 = engine.shell_value(&mut g, rho0);
        let (core, core_err) = match kern {
            None => {
                let nf = T::lit(n as f64);
                let area = sphere_area::<T>(n as u32 - 1);
                let fx = f.eval(x);
                let l = (T::one() + xnorm).ln();
                let r0n = rho0.powi(n as i32);
                let core = area * fx * (l * r0n / nf - r0n * rho0.ln() / nf + r0n / (nf * nf));
                let predicted = area * fx * pow(rho0) * (l - rho0.ln());
                (core, (g0 - predicted).abs() * rho0)
            }
            Some(k) => {
                let g1 = engine.shell_value(&mut g, rho0 * two);
                let e = T::lit(n as f64 - 1.0 - k.order() as f64);
                core_estimate(g0, g1, rho0, e)
            }
        };
        near = Estimate { value: q.value + core, err_est: q.err + core_err };
    }

    // outside B_1(x): polar about the density center, the unit ball about x removed
    let mut far = Estimate { value: T::zero(), err_est: T::zero() };
    if support.is_none_or(|(dx, _, s)| dx + s > T::one()) {
        let r_trunc = T::lit(spec.truncation_radius);
        let hi = match support {
            Some((_, dc, s)) => dc + s,
            None => r_trunc.max(T::lit(4.0) * (d + T::one())),
        };
        let angular = AngularIntegrator::new(&axis, axisym, order, rel * T::lit(0.1), ang_abs, spec.angular_budget());
        let mut breaks = dyadic_breaks(T::one().min(hi), hi);
        breaks.push(norm(&c0));
        if let Some((_, dc, s)) = support {
            breaks.extend([dc - s, s - dc]);
        }
        breaks.retain(|&b| b > T::zero() && b < hi);
        let engine = RadialPolar {
            angular: &angular,
            origin: &c0,
            rho_lo: T::zero(),
            rho_hi: hi,
            breaks,
            dyadic: false,
            exclusion: Some(Exclusion { distance: d, radius: T::one() }),
            opts,
        };
        let q = engine.integrate(&mut |rho: T, _w: &[T], y: &[T]| {
            let mut z = [T::zero(); MAX_DIM];
            for i in 0..n {
                z[i] = x[i] - y[i];
            }
            pow(rho) * kern_at(y, &z[..n]) * f.eval(y)
        });
        check_budget(&q, spec)?;
        let mut tail = T::zero();
        if support.is_none() {
            let tb = volume_tail(f, &c0, hi, order, spec.certify_tails)?;
            let kmax = match kern {
                None => (two + xnorm).ln(),
                Some(k) => k.magnitude_bound() * (hi - d).max(T::one()).powi(-(k.order() as i32)),
            };
            tail = kmax * tb.bound;
        }
        far = Estimate { value: q.value, err_est: q.err + tail };
    }

    let g = lp.gamma_n;
    Ok(Estimate { value: (near.value + far.value) / g, err_est: (near.err_est + far.err_est) / g })
}

/// `∫_{B_R} |D^α v| / (1 + |x|^(n+1))` for a sequence of radii.
#[derive(Clone, Debug, Serialize)]
pub struct WeightedNormReport {
    pub alpha: Vec<u32>,
    pub radii: Vec<f64>,
    pub integrals: Vec<f64>,
    pub err_est: Vec<f64>,
    /// Successive ratios `I(R_{k+1}) / I(R_k)`.
    pub ratios: Vec<f64>,
    pub pass: bool,
}

/// Ratio tolerance for convergence under radius doubling.
pub const WEIGHTED_NORM_TOLERANCE: f64 = 0.05;

/// Membership test in the weighted space `L_{1/2}`: the truncated weighted
/// norm of `D^α v` must settle as the radius grows. `outer` controls the
/// integration over the ball, `lp.spec()` each potential evaluation.
pub fn weighted_norm_check(
    lp: &LogPotential<f64>,
    alpha: &MultiIndex,
    radii: &[f64],
    outer: &QuadratureSpec,
) -> Result<WeightedNormReport> {
    if radii.len() < 2 || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidArgument("need at least two positive radii".into()));
    }
    let n = lp.dim();
    let inner_spec = lp.spec().clone();
    let lp2 = lp.clone();
    let a = alpha.clone();
    let weighted = ScalarField::new(n, move |x: &[f64]| {
        let v = lp2.derivative(x, &a, &inner_spec).map(|e| e.value).unwrap_or(f64::NAN);
        v.abs() / (1.0 + norm(x).powi(n as i32 + 1))
    })
    .with_smoothness(Smoothness::C0);
    let weighted = match lp.density().radial_center() {
        Some(c) if alpha.degree() == 0 => weighted.with_radial_center(&c.to_vec()),
        _ => weighted,
    };
    let mut integrals = Vec::new();
    let mut errs = Vec::new();
    for &r in radii {
        let q = truncated_integral(&weighted, &Domain::ball(&vec![0.0; n], r), outer)?;
        integrals.push(q.value);
        errs.push(q.err_est);
    }
    let ratios: Vec<f64> = integrals.windows(2).map(|w| w[1] / w[0]).collect();
    let pass = ratios.last().is_some_and(|r| (r - 1.0).abs() <= WEIGHTED_NORM_TOLERANCE)
        && integrals.iter().all(|v| v.is_finite());
    Ok(WeightedNormReport { alpha: alpha.0.clone(), radii: radii.to_vec(), integrals, err_est: errs, ratios, pass })
}
