//! Chebyshev interpolation of radial profiles on `[0, ∞)`.
//!
//! A profile `g(r)` with `g(r) ~ r^(-p)` at infinity is sampled as
//! `h(t) = g(r) (1 + r^2)^(p/2)` with `t = r^2 / (1 + r^2)`, which is smooth on
//! `[0, 1]` for fields that are smooth functions of `|x|^2`.

use rayon::prelude::*;

use crate::domain::field::{DecayHint, ScalarField, Smoothness};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RadialProfile {
    dim: usize,
    center: Vec<f64>,
    decay_power: f64,
    coeffs: Vec<f64>,
}

impl RadialProfile {
    /// Samples `g` at `nodes` Chebyshev points (in parallel) and stores the
    /// interpolant's coefficients.
    pub fn build<G>(dim: usize, center: &[f64], decay_power: f64, nodes: usize, g: G) -> Result<Self>
    where
        G: Fn(f64) -> Result<f64> + Sync,
    {
        if nodes < 2 {
            return Err(Error::InvalidArgument("profile needs at least two nodes".into()));
        }
        if center.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: center.len() });
        }
        let m = nodes;
        let theta: Vec<f64> = (0..m).map(|k| std::f64::consts::PI * (k as f64 + 0.5) / m as f64).collect();
        let samples: Vec<f64> = theta
            .par_iter()
            .map(|&th| {
                let t = 0.5 * (1.0 + th.cos());
                let s = t / (1.0 - t);
                let r = s.sqrt();
                g(r).map(|v| v * (1.0 + s).powf(0.5 * decay_power))
            })
            .collect::<Result<Vec<f64>>>()?;
        let coeffs = (0..m)
            .map(|j| {
                let s: f64 = samples.iter().zip(&theta).map(|(v, th)| v * (j as f64 * th).cos()).sum();
                let c = 2.0 * s / m as f64;
                if j == 0 {
                    0.5 * c
                } else {
                    c
                }
            })
            .collect();
        Ok(Self { dim, center: center.to_vec(), decay_power, coeffs })
    }

    pub fn eval_r(&self, r: f64) -> f64 {
        let s = r * r;
        let tau = 2.0 * s / (1.0 + s) - 1.0;
        // Clenshaw
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * tau * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        let h = tau * b1 - b2 + self.coeffs[0];
        h * (1.0 + s).powf(-0.5 * self.decay_power)
    }

    /// Magnitude of the trailing coefficients, a proxy for the
    /// interpolation error relative to the profile scale.
    pub fn tail_coefficient(&self) -> f64 {
        let k = self.coeffs.len();
        self.coeffs[k.saturating_sub(3)..].iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn to_field(&self) -> ScalarField {
        let p = self.clone();
        let c = self.center.clone();
        ScalarField::new(self.dim, move |x: &[f64]| p.eval_r(crate::domain::point::dist(x, &c)))
            .with_radial_center(&self.center)
            .with_decay(DecayHint::PowerDecay(self.decay_power))
            .with_smoothness(Smoothness::Smooth)
            .with_label("radial-profile")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_rational_profile() {
        let p = RadialProfile::build(3, &[0.0; 3], 2.0, 16, |r| Ok(1.0 / (1.0 + r * r))).unwrap();
        for &r in &[0.0, 0.3, 2.0, 50.0] {
            assert!((p.eval_r(r) - 1.0 / (1.0 + r * r)).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_profile_converges() {
        let p = RadialProfile::build(1, &[0.0], 0.0, 64, |r| Ok((-r * r).exp())).unwrap();
        for &r in &[0.0, 0.5, 1.3, 3.0] {
            assert!((p.eval_r(r) - (-r * r).exp()).abs() < 1e-9, "r={r}");
        }
    }
}
