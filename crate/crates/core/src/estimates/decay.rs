//! Decay of fractional Laplacians of Schwartz functions and of functions
//! with vanishing moments.

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::field::{DecayHint, ScalarField};
use crate::domain::geom::gamma_half;
use crate::domain::order::FracOrder;
use crate::domain::point::Point;
use crate::domain::polynomial::MultiIndex;
use crate::domain::radial::RadialForm;
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::estimates::fit::{log_radii, DecayReport, EXPONENT_TOLERANCE};
use crate::fraclap::{frac_lap, FracLapOperator, IntegerLapMode};
use crate::quad::volume::{truncated_integral, Domain};

/// Tolerance on the moments of the vanishing-moment family.
pub const MOMENT_TOLERANCE: f64 = 1e-10;

/// Evaluates `(-Δ)^s φ` at `c + r e_1` for each radius, in parallel.
pub(crate) fn sample_on_ray(
    phi: &ScalarField,
    s: FracOrder,
    center: &[f64],
    radii: &[f64],
    spec: &QuadratureSpec,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = phi.dim();
    let op = FracLapOperator::new(n, s, IntegerLapMode::AnalyticDerivatives)?;
    let rows: Vec<(f64, f64)> = radii
        .par_iter()
        .map(|&r| {
            let mut x = center.to_vec();
            x[0] += r;
            frac_lap(&op, phi, &Point::new(x)?, spec).map(|e| (e.value, e.err_est))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().unzip())
}

/// Fits the decay of `|(-Δ)^s φ|` along a ray from the center of `φ` over
/// the window; the prediction is `n + 2s`.
pub fn schwartz_decay_check(
    phi: &ScalarField,
    s: FracOrder,
    window: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<DecayReport> {
    if !matches!(phi.decay(), DecayHint::Schwartz) {
        return Err(Error::InvalidArgument(format!("field '{}' is not declared Schwartz class", phi.label())));
    }
    let radii = log_radii(window)?;
    let center = phi.center_hint().map(|c| c.to_vec()).unwrap_or_else(|| vec![0.0; phi.dim()]);
    let (values, errs) = sample_on_ray(phi, s, &center, &radii, spec)?;
    let predicted = phi.dim() as f64 + 2.0 * s.total();
    DecayReport::from_samples(radii, values, errs, predicted, EXPONENT_TOLERANCE)
}

/// `p(x_1) e^{-|x|^2}` with `p` the monic polynomial of degree `k+1`
/// orthogonal to `1, x, ..., x^k` under the Gaussian weight, so every
/// moment of order at most `k` vanishes.
#[derive(Clone, Debug, Serialize)]
pub struct MomentFamily {
    pub dim: usize,
    pub k: i32,
    /// Coefficients of `p` in increasing degree.
    pub coeffs: Vec<f64>,
}

/// `∫ t^m e^{-t^2} dt` over the line.
fn gauss_moment(m: usize) -> f64 {
    if m % 2 == 1 {
        0.0
    } else {
        gamma_half::<f64>(m as u32 + 1)
    }
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            s += ai * bj * gauss_moment(i + j);
        }
    }
    s
}

impl MomentFamily {
    /// Gram–Schmidt of `x^(k+1)` against the orthonormalized lower
    /// monomials.
    pub fn new(dim: usize, k: i32) -> Result<Self> {
        if k < -1 {
            return Err(Error::InvalidArgument(format!("moment order {k} must be at least -1")));
        }
        let deg = (k + 1) as usize;
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for d in 0..=deg {
            let mut v = vec![0.0; deg + 1];
            v[d] = 1.0;
            // modified Gram–Schmidt
            for b in &basis {
                let c = inner(&v, b);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
            if d < deg {
                let norm = inner(&v, &v).sqrt();
                v.iter_mut().for_each(|x| *x /= norm);
                basis.push(v);
            } else {
                return Ok(Self { dim, k, coeffs: v });
            }
        }
        unreachable!()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let t = x[0];
        let p = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
        p * (-x.iter().map(|v| v * v).sum::<f64>()).exp()
    }

    pub fn to_field(&self) -> ScalarField {
        if self.k == -1 {
            return RadialForm::gaussian(self.dim, &vec![0.0; self.dim], 1.0, 1.0).to_field().with_label("gaussian");
        }
        let me = self.clone();
        ScalarField::new(self.dim, move |x: &[f64]| me.eval(x))
            .with_decay(DecayHint::Schwartz)
            .with_label(format!("hermite-gaussian(k={})", self.k))
    }

    /// Computes every moment of order at most `k` by full-space quadrature
    /// and returns them; fails if any exceeds [`MOMENT_TOLERANCE`].
    pub fn verify_moments(&self, spec: &QuadratureSpec) -> Result<Vec<(MultiIndex, f64)>> {
        if self.k < 0 {
            return Ok(Vec::new());
        }
        let field = self.to_field();
        let mut out = Vec::new();
        for alpha in MultiIndex::all_up_to(self.dim, self.k as u32) {
            let a = alpha.clone();
            let g = field.with_eval({
                let f = field.clone();
                move |y: &[f64]| {
                    let mono: f64 = a.0.iter().zip(y).map(|(&e, &v)| v.powi(e as i32)).product();
                    mono * f.eval(y)
                }
            });
            let m = truncated_integral(&g, &Domain::FullSpace, spec)?.value;
            if m.abs() > MOMENT_TOLERANCE {
                return Err(Error::MomentCheck { order: alpha.degree() as usize, value: m, tol: MOMENT_TOLERANCE });
            }
            out.push((alpha, m));
        }
        Ok(out)
    }
}

/// Moment-vanishing decay report; `moments` lists the verified moments.
#[derive(Clone, Debug, Serialize)]
pub struct MomentDecayReport {
    pub family: MomentFamily,
    pub moments: Vec<(Vec<u32>, f64)>,
    pub decay: DecayReport,
}

/// Verifies the moments of the order-`k` family and fits the decay of its
/// `(-Δ)^σ`; the prediction is `n + 2σ + k + 1`. `k = -1` is the plain
/// Gaussian.
pub fn moment_decay_check(
    n: usize,
    k: i32,
    sigma: f64,
    window: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<MomentDecayReport> {
    let family = MomentFamily::new(n, k)?;
    let s = FracOrder::new(0, sigma)?;
    let phi = family.to_field();
    if k == -1 {
        let decay = schwartz_decay_check(&phi, s, window, spec)?;
        return Ok(MomentDecayReport { family, moments: Vec::new(), decay });
    }
    let moments = family.verify_moments(spec)?;
    let radii = log_radii(window)?;
    let (values, errs) = sample_on_ray(&phi, s, &vec![0.0; n], &radii, spec)?;
    let predicted = n as f64 + 2.0 * sigma + k as f64 + 1.0;
    let decay = DecayReport::from_samples(radii, values, errs, predicted, EXPONENT_TOLERANCE)?;
    Ok(MomentDecayReport { family, moments: moments.into_iter().map(|(a, m)| (a.0, m)).collect(), decay })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_is_hermite() {
        // H_2 / 4 = x^2 - 1/2 and H_3 / 8 = x^3 - 3x/2
        let f1 = MomentFamily::new(1, 1).unwrap();
        assert!((f1.coeffs[0] + 0.5).abs() < 1e-14 && f1.coeffs[1].abs() < 1e-14 && (f1.coeffs[2] - 1.0).abs() < 1e-14);
        let f2 = MomentFamily::new(1, 2).unwrap();
        assert!((f2.coeffs[1] + 1.5).abs() < 1e-13 && (f2.coeffs[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn moments_vanish() {
        let spec = QuadratureSpec::default();
        let m = MomentFamily::new(1, 2).unwrap().verify_moments(&spec).unwrap();
        assert_eq!(m.len(), 3);
    }
}
