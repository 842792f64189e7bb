//! Certified bounds for integrals omitted beyond a truncation radius.

use crate::domain::field::{DecayHint, ScalarField};
use crate::domain::point::{norm, MAX_DIM};
use crate::error::{Error, Result};
use crate::quad::adaptive::{integrate, AdaptiveOptions};
use crate::quad::sphere::SphereRule;
use crate::scalar::Real;

/// How a tail bound was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailMethod {
    /// Envelope from the decay hint, constant sampled on the truncation sphere.
    PowerDecayFormula,
    UserSupplied,
    /// The integrand vanishes identically beyond the radius.
    CompactSupport,
    /// Not certified.
    None,
}

/// Bound on the integral omitted beyond `radius`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailBound<T: Real = f64> {
    pub radius: T,
    pub bound: T,
    pub method: TailMethod,
}

impl<T: Real> TailBound<T> {
    pub fn exact(radius: T) -> Self {
        Self { radius, bound: T::zero(), method: TailMethod::CompactSupport }
    }
}

/// Safety factor applied to the sampled envelope constant.
pub const TAIL_SAFETY: f64 = 4.0;

/// `∫_R^∞ ρ^(-1-a) ψ(ρ) dρ` for `a > 0` and slowly varying `ψ`, via
/// `ρ = R u^(-1/a)` which maps the tail onto `(0, 1]` with unit weight.
pub fn power_tail<T: Real, F: Fn(T) -> T>(radius: T, a: T, psi: F) -> T {
    assert!(a > T::zero());
    let mut g = |u: T| -> (T, T) {
        if u <= T::zero() {
            return (T::zero(), T::zero());
        }
        let rho = radius * u.powf(-T::one() / a);
        let v = psi(rho);
        (if v.is_finite() { v } else { T::zero() }, T::zero())
    };
    let mut breaks: Vec<T> = (0..=60).map(|k| T::lit(0.5f64.powi(k))).collect();
    breaks.push(T::zero());
    let q = integrate(&mut g, &breaks, AdaptiveOptions::new(T::lit(1e-300), T::lit(1e-6), 600));
    radius.powf(-a) / a * (q.value.abs() + q.err)
}

/// Samples `|f| / envelope` on the sphere of radius `radius` about `center`
/// and returns the safety-scaled envelope constant.
pub fn envelope_constant<T: Real>(
    f: &ScalarField<T>,
    center: &[T],
    radius: T,
    order: usize,
) -> Result<T> {
    let decay = f.decay();
    if matches!(decay, DecayHint::None) {
        return Err(Error::TailNotCertifiable(format!(
            "field '{}' has no decay information",
            f.label()
        )));
    }
    let n = f.dim();
    let rule = SphereRule::<T>::new(n - 1, order.clamp(2, 12));
    let mut z = [T::zero(); MAX_DIM];
    let mut c = T::zero();
    for (w, _) in rule.iter() {
        for i in 0..n {
            z[i] = center[i] + radius * w[i];
        }
        let e = decay.envelope(norm(&z[..n])).unwrap_or_else(T::one);
        let v = f.eval(&z[..n]).abs();
        if e > T::zero() {
            c = c.max(v / e);
        } else if v > T::zero() {
            return Err(Error::TailNotCertifiable("envelope underflow".into()));
        }
    }
    if !c.is_finite() {
        return Err(Error::TailNotCertifiable("non-finite samples on truncation sphere".into()));
    }
    Ok(T::lit(TAIL_SAFETY) * c)
}

/// Envelope evaluated at the worst point of the sphere `|z - center| = ρ`.
pub fn shifted_envelope<T: Real>(decay: DecayHint<T>, offset: T, rho: T) -> T {
    let r = if decay.is_decaying() { (rho - offset).max(T::zero()) } else { rho + offset };
    decay.envelope(r).unwrap_or_else(T::infinity)
}

/// Bound on `∫_{|y - center| > R} |f(y)| dy`.
pub fn volume_tail<T: Real>(
    f: &ScalarField<T>,
    center: &[T],
    radius: T,
    order: usize,
    certify: bool,
) -> Result<TailBound<T>> {
    let n = f.dim();
    if let Some((c, s)) = f.support() {
        let d = crate::domain::point::dist(center, c);
        if d + s <= radius {
            return Ok(TailBound::exact(radius));
        }
    }
    let decay = f.decay();
    let rate = match decay.algebraic_rate() {
        Some(r) if !matches!(decay, DecayHint::LogGrowth) => r,
        _ => {
            if certify {
                return Err(Error::TailNotCertifiable(format!(
                    "decay of '{}' does not make it integrable",
                    f.label()
                )));
            }
            return Ok(TailBound { radius, bound: T::zero(), method: TailMethod::None });
        }
    };
    let nf = T::lit(n as f64);
    if rate <= nf {
        if certify {
            return Err(Error::NotIntegrable(format!(
                "decay rate {} does not exceed dimension {}",
                rate, n
            )));
        }
        return Ok(TailBound { radius, bound: T::zero(), method: TailMethod::None });
    }
    let c = envelope_constant(f, center, radius, order)?;
    let offset = norm(center);
    let a = (rate - nf) / T::lit(2.0);
    let area = crate::domain::geom::sphere_area::<T>(n as u32 - 1);
    let t = power_tail(radius, a, |rho| rho.powf(nf + a) * shifted_envelope(decay, offset, rho));
    Ok(TailBound { radius, bound: c * area * t, method: TailMethod::PowerDecayFormula })
}

/// Estimate of `∫_{|y - center| > R} f(y) dy` assuming `f` keeps its
/// angular profile on the truncation sphere and decays like its envelope.
pub fn volume_tail_estimate<T: Real>(f: &ScalarField<T>, center: &[T], radius: T, order: usize) -> T {
    let decay = f.decay();
    let n = f.dim();
    let Some(rate) = decay.algebraic_rate() else { return T::zero() };
    let nf = T::lit(n as f64);
    if !decay.is_decaying() || rate <= nf {
        return T::zero();
    }
    let rule = SphereRule::<T>::new(n - 1, order.clamp(2, 12));
    let mut z = [T::zero(); MAX_DIM];
    let mut s = T::zero();
    for (w, wt) in rule.iter() {
        for i in 0..n {
            z[i] = center[i] + radius * w[i];
        }
        s = s + wt * f.eval(&z[..n]);
    }
    let offset = norm(center);
    let a = (rate - nf) / T::lit(2.0);
    let e_r = shifted_envelope(decay, offset, radius);
    if !(e_r > T::zero()) || !s.is_finite() {
        return T::zero();
    }
    let t = power_tail(radius, a, |rho| rho.powf(nf + a) * shifted_envelope(decay, offset, rho));
    s / e_r * t
}
