//! Fundamental solutions `Φ` of `(-Δ)^(1/2)` and `Ψ` of `(-Δ)^((n-1)/2)` in
//! odd dimension `n >= 3`, and their convolutions with fields.

use serde::{Deserialize, Serialize};

use crate::domain::field::ScalarField;
use crate::domain::geom::{ball_volume, factorial, gamma_half};
use crate::domain::point::{dist, norm, Point};
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::fraclap::Estimate;
use crate::quad::adaptive::{dyadic_breaks, AdaptiveOptions};
use crate::quad::polar::RadialPolar;
use crate::quad::sphere::AngularIntegrator;
use crate::quad::tail::volume_tail;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `Φ = c |x|^(1-n)`, inverse of `(-Δ)^(1/2)`.
    HalfLap,
    /// `Ψ = c |x|^(-1)`, inverse of `(-Δ)^((n-1)/2)`.
    PolyHarm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalSolution<T: Real = f64> {
    kind: KernelKind,
    dim: usize,
    constant: T,
}

impl<T: Real> FundamentalSolution<T> {
    pub fn new(kind: KernelKind, dim: usize) -> Result<Self> {
        if dim < 3 || dim % 2 == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        let n = dim as u32;
        let half = factorial::<T>((n - 3) / 2);
        let constant = match kind {
            KernelKind::HalfLap => half / (T::lit(2.0) * T::PI().powf(T::lit((n + 1) as f64 / 2.0))),
            KernelKind::PolyHarm => {
                let denom = T::lit(n as f64) * T::lit(2.0).powi(n as i32 - 2) * ball_volume::<T>(n) * gamma_half::<T>(n) * half;
                gamma_half::<T>(1) / denom
            }
        };
        Ok(Self { kind, dim, constant })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self) -> T {
        self.constant
    }

    /// `p` in `c |z|^(-p)`.
    pub fn exponent(&self) -> i32 {
        match self.kind {
            KernelKind::HalfLap => self.dim as i32 - 1,
            KernelKind::PolyHarm => 1,
        }
    }

    pub fn eval(&self, z: &[T]) -> T {
        self.constant * norm(z).powi(-self.exponent())
    }
}

/// `(K * f)(x) = ∫ K(x - y) f(y) dy` by polar quadrature about `x`, where
/// the kernel singularity cancels against the Jacobian.
pub fn fundamental_convolve<T: Real>(
    fs: &FundamentalSolution<T>,
    f: &ScalarField<T>,
    x: &Point<T>,
    spec: &QuadratureSpec,
) -> Result<Estimate<T>> {
    spec.validate()?;
    let n = fs.dim;
    if f.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.dim() });
    }
    x.check_dim(n)?;
    let xs = x.coords();
    let mut axis = vec![T::zero(); n];
    axis[0] = T::one();
    let mut breaks = Vec::new();
    let mut axisym = false;
    if let Some(c) = f.center_hint() {
        let d = dist(xs, c);
        if d > T::zero() {
            for i in 0..n {
                axis[i] = (c[i] - xs[i]) / d;
            }
            breaks.push(d);
        }
        axisym = f.radial_center().is_some();
    }
    let mut hi = T::lit(spec.truncation_radius);
    let mut compact = false;
    if let Some((c, s)) = f.support() {
        let d = dist(xs, c);
        breaks.extend([d - s, d + s, s - d]);
        hi = d + s;
        compact = true;
    }
    if !(hi > T::zero()) {
        return Ok(Estimate { value: T::zero(), err_est: T::zero() });
    }
    breaks.extend(dyadic_breaks(T::one().min(hi), hi));
    breaks.retain(|&b| b > T::zero() && b < hi);
    let rel = T::lit(spec.rel_tol);
    let angular = AngularIntegrator::new(&axis, axisym, spec.angular_order as usize, rel * T::lit(0.1), T::min_positive_value(), spec.angular_budget());
    let engine = RadialPolar {
        angular: &angular,
        origin: xs,
        rho_lo: T::zero(),
        rho_hi: hi,
        breaks,
        dyadic: false,
        exclusion: None,
        opts: AdaptiveOptions::new(T::lit(spec.abs_tol), rel, spec.radial_budget()),
    };
    let e = n as i32 - 1 - fs.exponent();
    let q = engine.integrate(&mut |rho: T, _w: &[T], y: &[T]| rho.powi(e) * f.eval(y));
    let mut tail = T::zero();
    if !compact {
        let tb = volume_tail(f, xs, hi, spec.angular_order as usize, spec.certify_tails)?;
        tail = tb.bound * hi.powi(-fs.exponent());
    }
    Ok(Estimate { value: fs.constant * q.value, err_est: fs.constant * (q.err + tail) })
}
