//! The normalization constant `C_{n,σ} = (∫ (1 - cos x_1) |x|^(-n-2σ) dx)^(-1)`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::quad::adaptive::{dyadic_breaks, integrate, AdaptiveOptions};
use crate::quad::gauss::gk21;
use crate::quad::polar::core_estimate;
use crate::quad::sphere::AngularIntegrator;
use crate::scalar::{CompensatedSum, Real};

/// Value of the defining integral with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantIntegral {
    pub integral: f64,
    pub err: f64,
}

/// Number of periods covered by the oscillatory shells.
const PERIODS: u32 = 1 << 10;

/// `K(a) = ∫_0^∞ u^(-1-a) (1 - cos u) du` by dyadic shells near the origin,
/// one Kronrod panel per half period up to `2π · PERIODS`, and the
/// integrated-by-parts expansion of the tail.
fn radial_factor(a: f64) -> (f64, f64) {
    let g = |u: f64| -> (f64, f64) {
        // 1 - cos u = 2 sin^2(u/2) avoids cancellation near the origin
        let h = (0.5 * u).sin();
        (u.powf(-1.0 - a) * 2.0 * h * h, 0.0)
    };
    let pi = std::f64::consts::PI;
    let two_pi = 2.0 * pi;
    let u0 = two_pi * 0.5f64.powi(40);
    let inner = integrate(&mut |u| g(u), &dyadic_breaks(u0, two_pi), AdaptiveOptions::new(1e-300, 1e-15, 4000));
    let (core, core_err) = core_estimate(g(u0).0, g(2.0 * u0).0, u0, 1.0 - a);
    let mut outer = CompensatedSum::new();
    let mut outer_err = 0.0;
    for k in 0..(2 * PERIODS - 2) {
        let lo = two_pi + pi * k as f64;
        let p = gk21(&mut |u| g(u), lo, lo + pi);
        outer.add(p.value);
        outer_err += p.err;
    }
    // beyond R = 2π·PERIODS: ∫ u^(-1-a) = R^(-a)/a, and with b = 1 + a,
    // ∫ u^(-b) cos u = b R^(-b-1) - b(b+1)(b+2) R^(-b-3) + O(R^(-b-5))
    let r = two_pi * PERIODS as f64;
    let b = 1.0 + a;
    let osc = b * r.powf(-b - 1.0) - b * (b + 1.0) * (b + 2.0) * r.powf(-b - 3.0);
    let osc_err = b * (b + 1.0) * (b + 2.0) * (b + 3.0) * (b + 4.0) * r.powf(-b - 5.0);
    let value = inner.value + core + outer.value() + r.powf(-a) / a - osc;
    (value, inner.err + core_err + outer_err + osc_err)
}

/// `∫_{R^n} (1 - cos x_1) |x|^(-n-2σ) dx`.
///
/// In polar coordinates with `t = ω_1` the radial integral scales out:
/// the value is `∫_{S^(n-1)} |ω_1|^(2σ) dω · K(2σ)` with `K` the
/// one-dimensional radial integral. Both factors are computed numerically.
pub fn constant_integral(n: usize, sigma: f64) -> Result<ConstantIntegral> {
    if !matches!(n, 1 | 3 | 5) {
        return Err(Error::InvalidDimension(n));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::InvalidOrder(format!("sigma {sigma} outside (0, 1)")));
    }
    let a = 2.0 * sigma;
    let mut axis = vec![0.0; n];
    axis[0] = 1.0;
    let angular = AngularIntegrator::<f64>::new(&axis, true, 16, 1e-15, 1e-300, 4000);
    let ang = angular.integrate(&mut |w: &[f64]| w[0].abs().powf(a), 0.0);
    let (k, k_err) = radial_factor(a);
    Ok(ConstantIntegral { integral: ang.value * k, err: ang.err * k + ang.value * k_err })
}

fn cache() -> &'static Mutex<HashMap<(usize, u64), f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `C_{n,σ}` for `n ∈ {1, 3, 5}` and `σ ∈ (0, 1)`, computed once per pair and
/// cached.
pub fn normalization_constant<T: Real>(n: usize, sigma: T) -> Result<T> {
    let s = sigma.as_f64();
    let key = (n, s.to_bits());
    if let Some(&c) = cache().lock().expect("constant cache poisoned").get(&key) {
        return Ok(T::lit(c));
    }
    let c = 1.0 / constant_integral(n, s)?.integral;
    cache().lock().expect("constant cache poisoned").insert(key, c);
    Ok(T::lit(c))
}
