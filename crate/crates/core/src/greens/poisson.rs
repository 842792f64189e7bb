//! Poisson kernel of the half-Laplacian on a ball: `s`-harmonic extension of
//! exterior data.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::domain::field::{DecayHint, ScalarField};
use crate::domain::point::{dist, dot, norm, MAX_DIM};
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::fraclap::Estimate;
use crate::greens::g1::check_inside;
use crate::quad::adaptive::{integrate, AdaptiveOptions};
use crate::quad::sphere::AngularIntegrator;

/// Octaves of `|y|/r` resolved by breakpoints before the unbounded end.
const OCTAVES: i32 = 48;

/// `((r^2 - |x|^2) / (|y|^2 - r^2))^{1/2} |x - y|^{-n}` without the
/// normalizer; zero unless `|x| < r < |y|`.
pub fn halflap_poisson_shape(r: f64, x: &[f64], y: &[f64]) -> f64 {
    let r2 = r * r;
    if !(dot(x, x) < r2 && dot(y, y) > r2) {
        return 0.0;
    }
    ((r2 - dot(x, x)) / (dot(y, y) - r2)).sqrt() * dist(x, y).powi(-(x.len() as i32))
}

/// `∫_{|y|>r} shape(x, y) g(y) dy` with `|y| = r/t`, `t = 1 - s^2`, which
/// removes both the inverse square root at the sphere and the unbounded
/// range.
fn unnormalized(r: f64, g: &ScalarField, x: &[f64], spec: &QuadratureSpec) -> Estimate {
    let n = x.len();
    let m = norm(x);
    let mut axis = vec![0.0; n];
    if m > 0.0 {
        for i in 0..n {
            axis[i] = x[i] / m;
        }
    } else {
        axis[0] = 1.0;
    }
    let radial = g.radial_center().is_some_and(|c| norm(c) == 0.0);
    let ang = AngularIntegrator::new(
        &axis,
        radial,
        spec.angular_order as usize,
        spec.rel_tol * 0.1,
        spec.abs_tol * 1e-3,
        spec.angular_budget(),
    );
    let sx = (r * r - m * m).sqrt();
    let mut y = [0.0; MAX_DIM];
    let mut f = |s: f64| -> (f64, f64) {
        let t = 1.0 - s * s;
        if t <= 0.0 {
            return (0.0, 0.0);
        }
        let rho = r / t;
        let a = ang.integrate(
            &mut |w: &[f64]| {
                for i in 0..n {
                    y[i] = rho * w[i];
                }
                dist(x, &y[..n]).powi(-(n as i32)) * g.eval(&y[..n])
            },
            0.0,
        );
        let jac = rho.powi(n as i32 - 1) * sx * 2.0 / (t * (1.0 + t).sqrt());
        (jac * a.value, jac * a.err)
    };
    // s for |y| = r 2^k
    let mut breaks: Vec<f64> = (0..=OCTAVES).map(|k| (1.0 - 0.5f64.powi(k)).sqrt()).collect();
    breaks.push(1.0);
    let q = integrate(&mut f, &breaks, AdaptiveOptions::new(spec.abs_tol, spec.rel_tol, spec.radial_budget()));
    Estimate { value: q.value, err_est: q.err }
}

fn calibration_spec() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-12).with_abs_tol(1e-15)
}

/// Normalizer of the half-Laplacian Poisson kernel in dimension `n`: the
/// reciprocal of the unnormalized kernel mass at the center of the unit
/// ball. The kernel is scale invariant, so one value serves every radius.
pub fn halflap_poisson_constant(n: usize) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&n) {
        return *c;
    }
    let one = ScalarField::new(n, |_: &[f64]| 1.0).with_radial_center(&vec![0.0; n]);
    let mass = unnormalized(1.0, &one, &vec![0.0; n], &calibration_spec());
    let c = 1.0 / mass.value;
    cache.lock().unwrap().insert(n, c);
    c
}

/// Full kernel `P(x, y)` for `|x| < r < |y|`.
pub fn halflap_poisson_kernel(r: f64, x: &[f64], y: &[f64]) -> f64 {
    halflap_poisson_constant(x.len()) * halflap_poisson_shape(r, x, y)
}

/// Solution of `(-Δ)^{1/2} h = 0` in `B_r(0)` with `h = g` outside,
/// evaluated at `x ∈ B_r`. Data may grow at most linearly; linear growth
/// relies on the angular cancellation of the kernel at infinity.
pub fn poisson_extension_halflap(r: f64, g: &ScalarField, x: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    let n = x.len();
    if g.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: g.dim() });
    }
    check_inside(r, x, "x")?;
    match g.decay() {
        DecayHint::PolyGrowth(d) if d >= 2 => {
            return Err(Error::TailNotCertifiable(format!(
                "exterior data of polynomial degree {d} is not integrable against a kernel decaying like |y|^-(n+1)"
            )))
        }
        DecayHint::None if spec.certify_tails => {
            return Err(Error::TailNotCertifiable(format!("exterior data '{}' has no growth hint", g.label())))
        }
        _ => {}
    }
    if g.support().is_some_and(|(c, s)| norm(c) + s <= r) {
        return Ok(Estimate { value: 0.0, err_est: 0.0 });
    }
    let c = halflap_poisson_constant(n);
    let e = unnormalized(r, g, x, spec);
    Ok(Estimate { value: c * e.value, err_est: c * e.err_est })
}

/// Kernel mass `∫_{|y|>r} P(x, y) dy` (equal to 1 after calibration).
pub fn halflap_poisson_mass(r: f64, x: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    let one = ScalarField::new(x.len(), |_: &[f64]| 1.0).with_decay(DecayHint::PolyGrowth(0));
    poisson_extension_halflap(r, &one.with_radial_center(&vec![0.0; x.len()]), x, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::geom::gamma_half;
    use std::f64::consts::PI;

    #[test]
    fn constant_matches_closed_form() {
        // Γ(n/2) / π^{n/2 + 1}
        for n in [1usize, 3, 5] {
            let exact = gamma_half::<f64>(n as u32) / PI.powf(0.5 * n as f64 + 1.0);
            let c = halflap_poisson_constant(n);
            assert!((c / exact - 1.0).abs() < 1e-10, "n={n}: {c} vs {exact}");
        }
    }

    #[test]
    fn zero_data() {
        let v = poisson_extension_halflap(1.0, &ScalarField::zero(1), &[0.3], &QuadratureSpec::default()).unwrap();
        assert_eq!(v.value, 0.0);
    }
}
