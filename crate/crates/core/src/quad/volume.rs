//! Integrals of fields over balls, annuli, spheres and the whole space.

use serde::{Deserialize, Serialize};

use crate::domain::field::ScalarField;
use crate::domain::point::{dist, MAX_DIM};
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::quad::adaptive::{dyadic_breaks, AdaptiveOptions};
use crate::quad::polar::RadialPolar;
use crate::quad::sphere::AngularIntegrator;
use crate::quad::tail::{volume_tail, volume_tail_estimate, TailBound, TailMethod};
use crate::scalar::Real;

/// Integration region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    FullSpace,
    Ball { center: Vec<f64>, radius: f64 },
    Annulus { center: Vec<f64>, inner: f64, outer: f64 },
    /// Surface measure on the sphere `|y - center| = radius`.
    SphereSurface { center: Vec<f64>, radius: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct IntegralResult<T: Real = f64> {
    pub value: T,
    pub err_est: T,
    pub tail: TailBound<T>,
}

impl Domain {
    pub fn ball(center: &[f64], radius: f64) -> Self {
        Domain::Ball { center: center.to_vec(), radius }
    }

    fn check(&self, n: usize) -> Result<()> {
        let (c, ok) = match self {
            Domain::FullSpace => return Ok(()),
            Domain::Ball { center, radius } | Domain::SphereSurface { center, radius } => (center, *radius > 0.0),
            Domain::Annulus { center, inner, outer } => (center, *inner >= 0.0 && outer > inner),
        };
        if c.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: c.len() });
        }
        if !ok {
            return Err(Error::InvalidArgument(format!("degenerate domain {self:?}")));
        }
        Ok(())
    }
}

/// `∫_D f`. For [`Domain::FullSpace`] the part beyond the truncation radius
/// is estimated from the field on the truncation sphere and bounded from the
/// decay hint.
pub fn truncated_integral<T: Real>(f: &ScalarField<T>, domain: &Domain, spec: &QuadratureSpec) -> Result<IntegralResult<T>> {
    spec.validate()?;
    let n = f.dim();
    domain.check(n)?;
    let rel = T::lit(spec.rel_tol);
    let abs = T::lit(spec.abs_tol);
    let (center, lo, hi): (Vec<T>, T, T) = match domain {
        Domain::FullSpace => {
            let c = f.center_hint().map(|c| c.to_vec()).unwrap_or_else(|| vec![T::zero(); n]);
            (c, T::zero(), T::lit(spec.truncation_radius))
        }
        Domain::Ball { center, radius } | Domain::SphereSurface { center, radius } => {
            (center.iter().map(|&v| T::lit(v)).collect(), T::zero(), T::lit(*radius))
        }
        Domain::Annulus { center, inner, outer } => {
            (center.iter().map(|&v| T::lit(v)).collect(), T::lit(*inner), T::lit(*outer))
        }
    };
    let mut axis = vec![T::zero(); n];
    axis[0] = T::one();
    let mut breaks = Vec::new();
    if let Some(c) = f.center_hint() {
        let d = dist(c, &center);
        if d > T::zero() {
            for i in 0..n {
                axis[i] = (c[i] - center[i]) / d;
            }
            breaks.push(d);
        }
    }
    let mut hi = hi;
    if let Some((c, s)) = f.support() {
        let d = dist(c, &center);
        for b in [d - s, d + s, s - d] {
            if b > T::zero() {
                breaks.push(b);
            }
        }
        if matches!(domain, Domain::FullSpace) {
            hi = hi.min(d + s);
        }
    }
    let angular = AngularIntegrator::new(
        &axis,
        f.radial_center().is_some(),
        spec.angular_order as usize,
        rel * T::lit(0.1),
        T::min_positive_value(),
        spec.angular_budget(),
    );
    if let Domain::SphereSurface { .. } = domain {
        let mut y = [T::zero(); MAX_DIM];
        let r = angular.integrate(
            &mut |w: &[T]| {
                for i in 0..n {
                    y[i] = center[i] + hi * w[i];
                }
                f.eval(&y[..n])
            },
            T::zero(),
        );
        let jac = hi.powi(n as i32 - 1);
        return Ok(IntegralResult { value: jac * r.value, err_est: jac * r.err, tail: TailBound::exact(hi) });
    }
    if matches!(domain, Domain::FullSpace) {
        breaks.extend(dyadic_breaks(T::one().min(hi), hi));
    }
    let engine = RadialPolar {
        angular: &angular,
        origin: &center,
        rho_lo: lo,
        rho_hi: hi,
        breaks,
        dyadic: lo > T::zero(),
        exclusion: None,
        opts: AdaptiveOptions::new(abs, rel, spec.radial_budget()),
    };
    let q = engine.integrate(&mut |rho: T, _w: &[T], y: &[T]| rho.powi(n as i32 - 1) * f.eval(y));
    let mut est = T::zero();
    let tail = if matches!(domain, Domain::FullSpace) {
        if f.support().is_some_and(|(c, s)| dist(c, &center) + s <= hi) {
            TailBound::exact(hi)
        } else {
            let mut tb = volume_tail(f, &center, hi, spec.angular_order as usize, spec.certify_tails)?;
            est = volume_tail_estimate(f, &center, hi, spec.angular_order as usize);
            tb.bound = tb.bound.max(est.abs());
            tb
        }
    } else {
        TailBound { radius: hi, bound: T::zero(), method: TailMethod::CompactSupport }
    };
    Ok(IntegralResult { value: q.value + est, err_est: q.err + tail.bound, tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::field::DecayHint;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_over_space_and_ball() {
        let g = ScalarField::new(3, |x: &[f64]| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp())
            .with_decay(DecayHint::Schwartz)
            .with_radial_center(&[0.0, 0.0, 0.0]);
        let spec = QuadratureSpec::default();
        let r = truncated_integral(&g, &Domain::FullSpace, &spec).unwrap();
        assert!((r.value - PI.powf(1.5)).abs() < 1e-9, "{r:?}");
        // off-center ball picks up the non-radial geometry
        let ball = truncated_integral(&ScalarField::<f64>::constant(3, 1.0), &Domain::ball(&[1.0, 2.0, 0.0], 2.0), &spec).unwrap();
        assert!((ball.value - 4.0 / 3.0 * PI * 8.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_surface_and_annulus() {
        let spec = QuadratureSpec::default();
        let one = ScalarField::<f64>::constant(3, 1.0);
        let s = truncated_integral(&one, &Domain::SphereSurface { center: vec![0.0; 3], radius: 2.0 }, &spec).unwrap();
        assert!((s.value - 16.0 * PI).abs() < 1e-11);
        let a = truncated_integral(&one, &Domain::Annulus { center: vec![0.0; 3], inner: 1.0, outer: 2.0 }, &spec).unwrap();
        assert!((a.value - 4.0 / 3.0 * PI * 7.0).abs() < 1e-10);
    }

    #[test]
    fn heavy_tail_is_rejected() {
        let f = ScalarField::new(1, |x: &[f64]| 1.0 / (1.0 + x[0].abs())).with_decay(DecayHint::PowerDecay(1.0));
        assert!(truncated_integral(&f, &Domain::FullSpace, &QuadratureSpec::default()).is_err());
    }
}
