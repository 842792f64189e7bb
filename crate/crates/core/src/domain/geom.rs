use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `k!` as a floating-point number.
pub fn factorial<T: Real>(k: u32) -> T {
    (1..=k).fold(T::one(), |acc, j| acc * T::lit(j as f64))
}

/// `Γ(k/2)` for a positive integer `k`, from the exact recurrences.
pub fn gamma_half<T: Real>(k: u32) -> T {
    assert!(k > 0, "gamma_half(0) is a pole");
    if k % 2 == 0 {
        factorial(k / 2 - 1)
    } else {
        // Γ(m + 1/2) = (2m-1)!! / 2^m · sqrt(pi)
        let m = (k - 1) / 2;
        let mut v = T::PI().sqrt();
        for j in 0..m {
            v = v * (T::lit(j as f64) + T::lit(0.5));
        }
        v
    }
}

/// Surface area `|S^m|` of the unit sphere in R^(m+1).
pub fn sphere_area<T: Real>(m: u32) -> T {
    let e = T::lit((m + 1) as f64) / T::lit(2.0);
    T::lit(2.0) * T::PI().powf(e) / gamma_half::<T>(m + 1)
}

/// Volume `|B_1|` of the unit ball in R^n.
pub fn ball_volume<T: Real>(n: u32) -> T {
    sphere_area::<T>(n - 1) / T::lit(n as f64)
}

/// `|S^n|`, `|B_1|` (in R^n) and `γ_n = (n-1)!/2 · |S^n|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeomConstants<T: Real = f64> {
    pub dim: usize,
    pub sphere_area: T,
    pub ball_volume: T,
    pub gamma_n: T,
}

pub fn geom_constants<T: Real>(n: usize) -> Result<GeomConstants<T>> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let n32 = n as u32;
    let sphere_area = sphere_area::<T>(n32);
    let gamma_n = factorial::<T>(n32 - 1) / T::lit(2.0) * sphere_area;
    Ok(GeomConstants { dim: n, sphere_area, ball_volume: ball_volume::<T>(n32), gamma_n })
}

impl<T: Real> GeomConstants<T> {
    /// `|S^(n-1)|`, the area of the unit sphere of R^n.
    pub fn boundary_area(&self) -> T {
        sphere_area::<T>(self.dim as u32 - 1)
    }

    /// Canonical JSON with sorted keys.
    pub fn to_json(&self) -> Value {
        json!({
            "ball_volume": self.ball_volume.as_f64(),
            "dim": self.dim,
            "gamma_n": self.gamma_n.as_f64(),
            "sphere_area": self.sphere_area.as_f64(),
        })
    }
}
