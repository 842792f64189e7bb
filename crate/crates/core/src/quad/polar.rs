//! Polar-coordinate engines: radial-outer integration over shells about a
//! point, and angular-outer integration over a ball seen from an interior
//! point.

use crate::domain::point::{dot, MAX_DIM};
use crate::quad::adaptive::{dyadic_breaks, integrate, merge_breaks, AdaptiveOptions, Quad1d};
use crate::quad::sphere::{AngularIntegrator, AngularResult};
use crate::scalar::Real;

/// Ball of radius `radius` whose center lies at distance `distance` from the
/// polar origin along the polar axis; its points are left out.
#[derive(Clone, Copy, Debug)]
pub struct Exclusion<T: Real> {
    pub distance: T,
    pub radius: T,
}

impl<T: Real> Exclusion<T> {
    /// Smallest polar angle kept on the sphere of radius `rho`.
    pub fn theta_lo(&self, rho: T) -> T {
        let (d, r0) = (self.distance, self.radius);
        if d <= T::zero() {
            return if rho < r0 { T::PI() } else { T::zero() };
        }
        let kappa = (rho * rho + d * d - r0 * r0) / (T::lit(2.0) * rho * d);
        if kappa >= T::one() {
            T::zero()
        } else if kappa <= -T::one() {
            T::PI()
        } else {
            kappa.acos()
        }
    }
}

/// `∫_{lo}^{hi} ∫_{S^(n-1)} F(ρ, ω, y) dω dρ` with `y = origin + ρ ω`; the
/// integrand carries its own Jacobian factors.
pub struct RadialPolar<'a, T: Real> {
    pub angular: &'a AngularIntegrator<T>,
    pub origin: &'a [T],
    pub rho_lo: T,
    pub rho_hi: T,
    /// Extra radial breakpoints (kinks or singular spheres of the integrand).
    pub breaks: Vec<T>,
    /// Whether to add dyadic breakpoints between `rho_lo` and `rho_hi`.
    pub dyadic: bool,
    pub exclusion: Option<Exclusion<T>>,
    pub opts: AdaptiveOptions<T>,
}

impl<'a, T: Real> RadialPolar<'a, T> {
    pub fn integrate<F: FnMut(T, &[T], &[T]) -> T>(&self, f: &mut F) -> Quad1d<T> {
        if !(self.rho_hi > self.rho_lo) {
            return Quad1d::zero();
        }
        let n = self.origin.len();
        let base = if self.dyadic && self.rho_lo > T::zero() {
            dyadic_breaks(self.rho_lo, self.rho_hi)
        } else {
            vec![self.rho_lo, self.rho_hi]
        };
        let mut extra = self.breaks.clone();
        if let Some(ex) = self.exclusion {
            extra.push((ex.distance - ex.radius).abs());
            extra.push(ex.distance + ex.radius);
        }
        let breaks = merge_breaks(base, &extra, self.rho_lo, self.rho_hi);
        let origin = self.origin;
        let angular = self.angular;
        let exclusion = self.exclusion;
        let mut g = |rho: T| -> (T, T) {
            let theta_lo = exclusion.map(|e| e.theta_lo(rho)).unwrap_or_else(T::zero);
            let mut y = [T::zero(); MAX_DIM];
            let r = angular.integrate(
                &mut |w: &[T]| {
                    for i in 0..n {
                        y[i] = origin[i] + rho * w[i];
                    }
                    f(rho, w, &y[..n])
                },
                theta_lo,
            );
            (r.value, r.err)
        };
        integrate(&mut g, &breaks, self.opts)
    }

    /// Value of the sphere integral at a single radius (for core estimates).
    pub fn shell_value<F: FnMut(T, &[T], &[T]) -> T>(&self, f: &mut F, rho: T) -> T {
        let n = self.origin.len();
        let theta_lo = self.exclusion.map(|e| e.theta_lo(rho)).unwrap_or_else(T::zero);
        let mut y = [T::zero(); MAX_DIM];
        let origin = self.origin;
        self.angular
            .integrate(
                &mut |w: &[T]| {
                    for i in 0..n {
                        y[i] = origin[i] + rho * w[i];
                    }
                    f(rho, w, &y[..n])
                },
                theta_lo,
            )
            .value
    }
}

/// Approximates `∫_0^{ρ0} g` for a radial integrand behaving like `c ρ^e`
/// near zero, from `g(ρ0)` and `g(2ρ0)`. Returns `(value, error)`.
pub fn core_estimate<T: Real>(g0: T, g1: T, rho0: T, e: T) -> (T, T) {
    let core = g0 * rho0 / (e + T::one());
    if g0 == T::zero() {
        return (T::zero(), g1.abs() * rho0);
    }
    if g1 != T::zero() && g0.signum() == g1.signum() {
        let e_hat = (g1 / g0).log2();
        if e_hat > -T::one() + T::lit(1e-3) {
            let alt = g0 * rho0 / (e_hat + T::one());
            return (core, (core - alt).abs());
        }
    }
    (core, core.abs())
}

/// Distance from interior point `x` to the sphere `|y - c| = r` along the
/// unit direction `w`.
#[inline]
pub fn ball_exit<T: Real>(x: &[T], c: &[T], r: T, w: &[T]) -> T {
    let n = x.len();
    let mut d = [T::zero(); MAX_DIM];
    for i in 0..n {
        d[i] = x[i] - c[i];
    }
    let b = dot(&d[..n], w);
    let q = b * b + r * r - dot(&d[..n], &d[..n]);
    -b + q.max(T::zero()).sqrt()
}

/// `∫_{S^(n-1)} ∫_0^{ρ_b(ω)} F(ρ, ω, y) dρ dω` over the ball `B(c, r)` seen
/// from the interior point `x`.
pub struct BallPolar<'a, T: Real> {
    pub angular: &'a AngularIntegrator<T>,
    pub x: &'a [T],
    pub center: &'a [T],
    pub radius: T,
    /// Radii (from `x`) of singular spheres to split the inner integral at.
    pub breaks: Vec<T>,
    /// Number of geometric breakpoints `ρ_b 2^-k` toward the origin.
    pub inner_levels: u32,
    pub radial_opts: AdaptiveOptions<T>,
}

impl<'a, T: Real> BallPolar<'a, T> {
    pub fn integrate<F: FnMut(T, &[T], &[T]) -> T>(&self, f: &mut F) -> AngularResult<T> {
        let n = self.x.len();
        let x = self.x;
        let mut y = [T::zero(); MAX_DIM];
        let mut wbuf = [T::zero(); MAX_DIM];
        let levels = self.inner_levels;
        self.angular.integrate_with_err(
            &mut |w: &[T]| {
                let rb = ball_exit(x, self.center, self.radius, w);
                if rb <= T::zero() {
                    return (T::zero(), T::zero());
                }
                wbuf[..n].copy_from_slice(w);
                let mut pts: Vec<T> = (1..=levels).map(|k| rb * T::lit(0.5f64.powi(k as i32))).collect();
                pts.push(T::zero());
                pts.push(rb);
                let pts = merge_breaks(pts, &self.breaks, T::zero(), rb);
                let mut g = |rho: T| -> (T, T) {
                    for i in 0..n {
                        y[i] = x[i] + rho * wbuf[i];
                    }
                    (f(rho, &wbuf[..n], &y[..n]), T::zero())
                };
                let q = integrate(&mut g, &pts, self.radial_opts);
                (q.value, q.err)
            },
            T::zero(),
        )
    }
}
