//! Symmetrized principal-value integrals `∫ sd(y) |y|^(-n-2σ) dy`.

use std::sync::Arc;

use crate::domain::field::ScalarField;
use crate::domain::geom::sphere_area;
use crate::domain::point::{dist, Point, MAX_DIM};
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::quad::adaptive::AdaptiveOptions;
use crate::quad::polar::{core_estimate, RadialPolar};
use crate::quad::sphere::AngularIntegrator;
use crate::quad::tail::{power_tail, shifted_envelope, TailBound, TailMethod, TAIL_SAFETY};
use crate::scalar::Real;

pub type SdFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

/// Information used to bound the part of the integral beyond the truncation
/// radius.
#[derive(Clone, Debug)]
pub enum TailSource<T: Real> {
    /// Bound from the field's decay hint (the second difference is built
    /// from this field).
    Field(ScalarField<T>),
    /// Caller-certified bound on the omitted `f(x ± y)` contributions.
    UserSupplied(T),
    /// `f(x ± y)` vanishes for `|y|` beyond this radius.
    VanishesBeyond(T),
    None,
}

/// Second-difference integrand centered at a point.
#[derive(Clone)]
pub struct PvIntegrand<T: Real = f64> {
    pub center: Point<T>,
    /// `y -> f(x+y) + f(x-y) - 2 f(x)`.
    pub second_difference: SdFn<T>,
    /// `n + 2σ`.
    pub singular_exponent: T,
    /// The `-2 f(x)` part of the second difference, integrated analytically
    /// beyond the truncation radius.
    pub constant_part: T,
    /// Polar axis (defaults to `e_1`).
    pub axis: Option<Vec<T>>,
    /// Whether the second difference depends only on `|y|` and the angle
    /// with the axis.
    pub axisymmetric: bool,
    /// Radii where the integrand is not smooth.
    pub radial_breaks: Vec<T>,
    pub tail: TailSource<T>,
    /// Absolute noise level of second-difference values (zero for fields
    /// evaluated to working precision).
    pub noise: T,
    /// Lower bound for the innermost shell radius.
    pub min_radius: T,
}

impl<T: Real> std::fmt::Debug for PvIntegrand<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PvIntegrand")
            .field("center", &self.center)
            .field("singular_exponent", &self.singular_exponent)
            .field("axisymmetric", &self.axisymmetric)
            .field("radial_breaks", &self.radial_breaks)
            .finish()
    }
}

/// Value of a principal-value integral with its error budget.
#[derive(Clone, Copy, Debug)]
pub struct PvResult<T: Real = f64> {
    pub value: T,
    pub err_est: T,
    pub tail: TailBound<T>,
    /// Contribution assigned to the ball inside the innermost shell.
    pub core: T,
    pub converged: bool,
}

impl<T: Real> PvIntegrand<T> {
    /// Builds the integrand for `(-Δ)^σ f` at `x`, deriving the polar axis,
    /// symmetry and breakpoints from the field metadata.
    pub fn from_field(f: &ScalarField<T>, x: &Point<T>, sigma: T) -> Result<Self> {
        x.check_dim(f.dim())?;
        if !(sigma > T::zero() && sigma < T::one()) {
            return Err(Error::InvalidOrder(format!("sigma {sigma} outside (0, 1)")));
        }
        let n = f.dim();
        let xs = x.coords().to_vec();
        let fx = f.eval(&xs);
        let field = f.clone();
        let xc = xs.clone();
        let sd: SdFn<T> = Arc::new(move |y: &[T]| {
            let mut p = [T::zero(); MAX_DIM];
            let mut m = [T::zero(); MAX_DIM];
            for i in 0..n {
                p[i] = xc[i] + y[i];
                m[i] = xc[i] - y[i];
            }
            field.eval(&p[..n]) + field.eval(&m[..n]) - (fx + fx)
        });
        let mut axis = None;
        let mut breaks = Vec::new();
        if let Some(c) = f.center_hint() {
            let d = dist(&xs, c);
            if d > T::zero() {
                axis = Some(c.iter().zip(&xs).map(|(&ci, &xi)| ci - xi).collect());
                breaks.push(d);
            }
        }
        let axisymmetric = f.radial_center().is_some()
            && (axis.is_some() || f.radial_center().map(|c| dist(c, &xs) == T::zero()).unwrap_or(false));
        let mut tail = TailSource::Field(f.clone());
        if let Some((c, s)) = f.support() {
            let d = dist(&xs, c);
            for b in [d - s, d + s, s - d] {
                if b > T::zero() {
                    breaks.push(b);
                }
            }
            tail = TailSource::VanishesBeyond(d + s);
        }
        Ok(Self {
            center: x.clone(),
            second_difference: sd,
            singular_exponent: T::lit(n as f64) + sigma + sigma,
            constant_part: -(fx + fx),
            axis,
            axisymmetric,
            radial_breaks: breaks,
            tail,
            noise: T::zero(),
            min_radius: T::zero(),
        })
    }
}

/// Adaptive shell quadrature of `∫_{R^n} sd(y) |y|^(-n-2σ) dy`.
///
/// The region `ρ0 < |y| < R` is split into dyadic shells (`ρ0 = 2^-J R`,
/// `J = max_subdivisions`), integrated by Gauss–Kronrod in `ρ` and the sphere
/// rule in angle. The inner ball is replaced by its leading-order Taylor
/// value, the constant part of the second difference is integrated exactly
/// beyond `R`, and the remaining tail is estimated from the integrand on the
/// truncation sphere and bounded from the decay hint.
pub fn pv_integral<T: Real>(integrand: &PvIntegrand<T>, spec: &QuadratureSpec) -> Result<PvResult<T>> {
    spec.validate()?;
    let n = integrand.center.dim();
    let a = integrand.singular_exponent - T::lit(n as f64);
    if !(a > T::zero() && a < T::lit(2.0)) {
        return Err(Error::InvalidOrder(format!(
            "singular exponent {} must lie in (n, n+2)",
            integrand.singular_exponent
        )));
    }
    let area = sphere_area::<T>(n as u32 - 1);
    let (radius, mut tail) = match &integrand.tail {
        TailSource::VanishesBeyond(rs) if *rs > T::zero() => (*rs, TailBound::exact(*rs)),
        TailSource::VanishesBeyond(_) => {
            // degenerate support: the field vanishes away from the center
            let zero = T::zero();
            return Ok(PvResult { value: zero, err_est: zero, tail: TailBound::exact(zero), core: zero, converged: true });
        }
        _ => {
            let r = T::lit(spec.truncation_radius);
            (r, TailBound { radius: r, bound: T::zero(), method: TailMethod::None })
        }
    };
    let rel = T::lit(spec.rel_tol);
    let abs = T::lit(spec.abs_tol);
    let axis = integrand.axis.clone().unwrap_or_else(|| {
        let mut e = vec![T::zero(); n];
        e[0] = T::one();
        e
    });
    let rho0 = (radius * T::lit(0.5).powi(spec.max_subdivisions as i32)).max(integrand.min_radius);
    if !(rho0 < radius) {
        return Err(Error::InvalidArgument("innermost shell lies beyond the truncation radius".into()));
    }
    // noisy integrands: shells cannot resolve below the noise carried by
    // ρ^(-1-a) at the innermost radius
    let noise_floor = integrand.noise * area * rho0.powf(-T::one() - a);
    let abs = abs.max(noise_floor * rho0 * T::lit(10.0) / a);
    let angular = AngularIntegrator::new(
        &axis,
        integrand.axisymmetric,
        spec.angular_order as usize,
        rel * T::lit(0.1),
        noise_floor.max(T::min_positive_value()),
        spec.angular_budget(),
    );
    let origin = vec![T::zero(); n];
    let mut breaks = integrand.radial_breaks.clone();
    breaks.retain(|b| b.is_finite());
    let engine = RadialPolar {
        angular: &angular,
        origin: &origin,
        rho_lo: rho0,
        rho_hi: radius,
        breaks,
        dyadic: true,
        exclusion: None,
        opts: AdaptiveOptions::new(abs, rel, spec.radial_budget()),
    };
    let sd = integrand.second_difference.clone();
    let expo = -T::one() - a;
    let mut g = |rho: T, _w: &[T], y: &[T]| rho.powf(expo) * sd(y);
    let shells = engine.integrate(&mut g);
    let g0 = engine.shell_value(&mut g, rho0);
    let g1 = engine.shell_value(&mut g, rho0 + rho0);
    let (core, core_err) = core_estimate(g0, g1, rho0, T::one() - a);

    // beyond the radius
    let mut far_value = T::zero();
    match &integrand.tail {
        TailSource::Field(f) => {
            let decay = f.decay();
            let rate = decay.algebraic_rate();
            if decay.is_decaying() {
                far_value = integrand.constant_part * area * radius.powf(-a) / a;
            }
            match rate {
                None => {
                    if spec.certify_tails {
                        return Err(Error::TailNotCertifiable(format!(
                            "field '{}' has no decay information",
                            f.label()
                        )));
                    }
                }
                Some(r) if !decay.is_decaying() && -r >= a && !matches!(decay, crate::domain::field::DecayHint::LogGrowth) => {
                    return Err(Error::TailNotCertifiable(format!(
                        "growth of degree {} is not integrable against |y|^(-n-{})",
                        -r, a
                    )));
                }
                Some(_) => {
                    let x = integrand.center.coords();
                    let fx = -integrand.constant_part / T::lit(2.0);
                    let shift = if decay.is_decaying() { T::zero() } else { fx };
                    let c = sampled_constant(f, x, radius, shift, spec.angular_order as usize)?;
                    let offset = crate::domain::point::norm(x);
                    let shape = |rho: T| shifted_envelope(decay, offset, rho);
                    let t = power_tail(radius, a, shape);
                    // shape-based estimate of the non-constant part beyond R
                    let cp = if decay.is_decaying() { integrand.constant_part } else { T::zero() };
                    let mut yb = [T::zero(); MAX_DIM];
                    let s_r = angular
                        .integrate(
                            &mut |w: &[T]| {
                                for i in 0..n {
                                    yb[i] = radius * w[i];
                                }
                                sd(&yb[..n]) - cp
                            },
                            T::zero(),
                        )
                        .value;
                    let e_r = shape(radius);
                    let est = if e_r > T::zero() && s_r.is_finite() { s_r / e_r * t } else { T::zero() };
                    far_value = far_value + est;
                    let bound = T::lit(2.0) * c * area * t;
                    tail = TailBound { radius, bound: bound.max(est.abs()), method: TailMethod::PowerDecayFormula };
                }
            }
        }
        TailSource::UserSupplied(b) => {
            far_value = integrand.constant_part * area * radius.powf(-a) / a;
            tail = TailBound { radius, bound: b.abs(), method: TailMethod::UserSupplied };
        }
        TailSource::VanishesBeyond(_) => {
            far_value = integrand.constant_part * area * radius.powf(-a) / a;
        }
        TailSource::None => {
            if spec.certify_tails {
                return Err(Error::TailNotCertifiable("no tail information supplied".into()));
            }
            far_value = integrand.constant_part * area * radius.powf(-a) / a;
        }
    }

    let value = shells.value + core + far_value;
    let err_est = shells.err + core_err + tail.bound;
    let target = abs.max(rel * value.abs());
    if !shells.converged && shells.err > T::lit(BUDGET_SLACK) * target {
        return Err(Error::BudgetExhausted { err: shells.err.as_f64(), target: target.as_f64() });
    }
    Ok(PvResult { value, err_est, tail, core, converged: shells.converged })
}

/// Error-estimate multiple of the target tolerance tolerated when the panel
/// budget runs out before convergence.
pub const BUDGET_SLACK: f64 = 1.0e3;

/// `TAIL_SAFETY * max |f(z) - shift| / e(|z|)` over the truncation sphere.
fn sampled_constant<T: Real>(f: &ScalarField<T>, x: &[T], radius: T, shift: T, order: usize) -> Result<T> {
    let n = f.dim();
    let rule = crate::quad::sphere::SphereRule::<T>::new(n - 1, order.clamp(2, 12));
    let decay = f.decay();
    let mut z = [T::zero(); MAX_DIM];
    let mut c = T::zero();
    for (w, _) in rule.iter() {
        for i in 0..n {
            z[i] = x[i] + radius * w[i];
        }
        let e = decay.envelope(crate::domain::point::norm(&z[..n])).unwrap_or_else(T::one);
        let v = (f.eval(&z[..n]) - shift).abs();
        if e > T::zero() {
            c = c.max(v / e);
        }
    }
    if !c.is_finite() {
        return Err(Error::TailNotCertifiable("non-finite samples on truncation sphere".into()));
    }
    Ok(T::lit(TAIL_SAFETY) * c)
}
