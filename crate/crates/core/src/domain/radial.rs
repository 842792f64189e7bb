//! Radial closed forms `h(|x - c|^2)` whose Laplacians stay in closed form.

use std::sync::Arc;

use crate::domain::field::{DecayHint, ScalarField, Smoothness};
use crate::domain::point::dist;
use crate::scalar::Real;

/// Factor multiplying the polynomial part of a radial form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Envelope<T: Real> {
    /// Polynomial truncated to `s < radius^2`; `vanishing` is the order of
    /// the factor `(radius^2 - s)` carried by the polynomial.
    Compact { radius: T, vanishing: u32 },
    /// `exp(-a s)`.
    Gaussian { a: T },
    /// `(1 + b s)^(-m)`.
    Rational { b: T, m: u32 },
}

/// `h(s) = p(s) E(s)` with `s = |x - c|^2` and `p` a polynomial in `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialForm<T: Real> {
    dim: usize,
    center: Vec<T>,
    coeffs: Vec<T>,
    envelope: Envelope<T>,
}

fn poly_eval<T: Real>(c: &[T], s: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &a| acc * s + a)
}

fn poly_deriv<T: Real>(c: &[T]) -> Vec<T> {
    if c.len() <= 1 {
        return vec![T::zero()];
    }
    c.iter().enumerate().skip(1).map(|(k, &a)| a * T::lit(k as f64)).collect()
}

fn poly_add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| *a.get(k).unwrap_or(&T::zero()) + *b.get(k).unwrap_or(&T::zero()))
        .collect()
}

fn poly_scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

/// Multiplies by `(c0 + c1 s)`.
fn poly_mul_linear<T: Real>(a: &[T], c0: T, c1: T) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + 1];
    for (k, &x) in a.iter().enumerate() {
        out[k] = out[k] + c0 * x;
        out[k + 1] = out[k + 1] + c1 * x;
    }
    out
}

fn poly_trim<T: Real>(mut a: Vec<T>) -> Vec<T> {
    while a.len() > 1 && *a.last().unwrap() == T::zero() {
        a.pop();
    }
    a
}

impl<T: Real> RadialForm<T> {
    pub fn new(dim: usize, center: &[T], coeffs: Vec<T>, envelope: Envelope<T>) -> Self {
        assert_eq!(center.len(), dim);
        Self { dim, center: center.to_vec(), coeffs: poly_trim(coeffs), envelope }
    }

    /// Gaussian `amplitude * exp(-a |x - c|^2)`.
    pub fn gaussian(dim: usize, center: &[T], a: T, amplitude: T) -> Self {
        Self::new(dim, center, vec![amplitude], Envelope::Gaussian { a })
    }

    /// `amplitude * (1 - |x - c|^2 / radius^2)_+^power`.
    pub fn bump(dim: usize, center: &[T], radius: T, power: u32, amplitude: T) -> Self {
        // expand (1 - s/R^2)^m
        let inv = -T::one() / (radius * radius);
        let mut coeffs = vec![amplitude];
        for _ in 0..power {
            coeffs = poly_mul_linear(&coeffs, T::one(), inv);
        }
        Self::new(dim, center, coeffs, Envelope::Compact { radius, vanishing: power })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> &[T] {
        &self.center
    }

    pub fn envelope(&self) -> Envelope<T> {
        self.envelope
    }

    /// Value as a function of `s = |x - c|^2`.
    pub fn eval_s(&self, s: T) -> T {
        match self.envelope {
            Envelope::Compact { radius, .. } => {
                if s >= radius * radius {
                    T::zero()
                } else {
                    poly_eval(&self.coeffs, s)
                }
            }
            Envelope::Gaussian { a } => poly_eval(&self.coeffs, s) * (-a * s).exp(),
            Envelope::Rational { b, m } => {
                poly_eval(&self.coeffs, s) * (T::one() + b * s).powi(-(m as i32))
            }
        }
    }

    pub fn eval(&self, x: &[T]) -> T {
        let r = dist(x, &self.center);
        self.eval_s(r * r)
    }

    /// Exact Laplacian, using `Δh = 4 s h''(s) + 2 n h'(s)` for radial `h`.
    pub fn laplacian(&self) -> Self {
        let n2 = T::lit(2.0 * self.dim as f64);
        let four = T::lit(4.0);
        let p = &self.coeffs;
        let s_times = |q: &[T]| poly_mul_linear(q, T::zero(), T::one());
        let (coeffs, envelope) = match self.envelope {
            Envelope::Compact { radius, vanishing } => {
                let d1 = poly_deriv(p);
                let d2 = poly_deriv(&d1);
                let c = poly_add(&poly_scale(&s_times(&d2), four), &poly_scale(&d1, n2));
                (c, Envelope::Compact { radius, vanishing: vanishing.saturating_sub(2) })
            }
            Envelope::Gaussian { a } => {
                let d1 = poly_deriv(p);
                let d2 = poly_deriv(&d1);
                let q1 = poly_add(&d1, &poly_scale(p, -a));
                let q2 = poly_add(
                    &poly_add(&d2, &poly_scale(&d1, -(a + a))),
                    &poly_scale(p, a * a),
                );
                let c = poly_add(&poly_scale(&s_times(&q2), four), &poly_scale(&q1, n2));
                (c, Envelope::Gaussian { a })
            }
            Envelope::Rational { b, m } => {
                let mf = T::lit(m as f64);
                // h' = P1 / (1+bs)^(m+1)
                let p1 = poly_add(
                    &poly_mul_linear(&poly_deriv(p), T::one(), b),
                    &poly_scale(p, -mf * b),
                );
                // h'' = P2 / (1+bs)^(m+2)
                let p2 = poly_add(
                    &poly_mul_linear(&poly_deriv(&p1), T::one(), b),
                    &poly_scale(&p1, -(mf + T::one()) * b),
                );
                let c = poly_add(
                    &poly_scale(&s_times(&p2), four),
                    &poly_scale(&poly_mul_linear(&p1, T::one(), b), n2),
                );
                // Δ gains two orders of decay; the leading coefficients cancel
                // exactly in exact arithmetic, so drop their rounding residue.
                let big = c.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
                let mut c = c;
                while c.len() > 1 && c.last().unwrap().abs() <= T::lit(1e-12) * big {
                    c.pop();
                }
                (c, Envelope::Rational { b, m: m + 2 })
            }
        };
        Self::new(self.dim, &self.center, coeffs, envelope)
    }

    pub fn neg_laplacian(&self) -> Self {
        let mut l = self.laplacian();
        l.coeffs = poly_scale(&l.coeffs, -T::one());
        l
    }

    /// Decay metadata implied by the closed form.
    pub fn decay_hint(&self) -> DecayHint<T> {
        match self.envelope {
            Envelope::Compact { .. } | Envelope::Gaussian { .. } => DecayHint::Schwartz,
            Envelope::Rational { m, .. } => {
                let deg = self.coeffs.len() as i64 - 1;
                let rate = 2 * (m as i64 - deg);
                if rate >= 0 {
                    DecayHint::PowerDecay(T::lit(rate as f64))
                } else {
                    DecayHint::PolyGrowth((-rate) as u32)
                }
            }
        }
    }

    /// Converts to a field whose `-Δ` closure is generated symbolically.
    pub fn to_field(&self) -> ScalarField<T> {
        let form = Arc::new(self.clone());
        let eval_form = form.clone();
        let mut f = ScalarField::new(self.dim, move |x| eval_form.eval(x))
            .with_decay(self.decay_hint())
            .with_radial_center(&self.center)
            .with_label(format!("radial[{:?}]", self.envelope));
        if let Envelope::Compact { radius, vanishing } = self.envelope {
            f = f.with_support(&self.center, radius).with_smoothness(if vanishing >= 3 {
                Smoothness::C2
            } else {
                Smoothness::C0
            });
        }
        let lap_form = form;
        f.with_neg_laplacian(move || lap_form.neg_laplacian().to_field())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_laplacian(f: &RadialForm<f64>, x: &[f64], h: f64) -> f64 {
        let mut acc = 0.0;
        let f0 = f.eval(x);
        for i in 0..x.len() {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            acc += (f.eval(&xp) + f.eval(&xm) - 2.0 * f0) / (h * h);
        }
        acc
    }

    #[test]
    fn laplacians_match_finite_differences() {
        let c = [0.1, -0.2, 0.3];
        let x = [0.4, 0.5, -0.35];
        let forms = [
            RadialForm::gaussian(3, &c, 0.7, 2.0),
            RadialForm::bump(3, &c, 2.0, 6, 1.5),
            RadialForm::new(3, &c, vec![1.0, 2.0], Envelope::Rational { b: 0.5, m: 3 }),
        ];
        for f in &forms {
            let exact = f.laplacian().eval(&x);
            let fd = fd_laplacian(f, &x, 1e-4);
            assert!((exact - fd).abs() < 1e-5 * (1.0 + exact.abs()), "{f:?}: {exact} vs {fd}");
            let exact2 = f.laplacian().laplacian().eval(&x);
            let fd2 = fd_laplacian(&f.laplacian(), &x, 1e-4);
            assert!((exact2 - fd2).abs() < 1e-4 * (1.0 + exact2.abs()));
        }
    }

    #[test]
    fn bump_is_compact_and_tracks_smoothness() {
        let b = RadialForm::bump(1, &[0.0], 1.0, 3, 1.0);
        assert_eq!(b.eval(&[1.5]), 0.0);
        assert!((b.eval(&[0.5]) - 0.75f64.powi(3)).abs() < 1e-15);
        let f = b.to_field();
        assert_eq!(f.smoothness(), Smoothness::C2);
        assert_eq!(f.neg_laplacian().unwrap().smoothness(), Smoothness::C0);
    }

    #[test]
    fn rational_decay_rate() {
        let r = RadialForm::new(3, &[0.0; 3], vec![1.0, 1.0], Envelope::Rational { b: 1.0, m: 2 });
        assert_eq!(r.decay_hint(), DecayHint::PowerDecay(2.0));
        assert_eq!(r.laplacian().decay_hint(), DecayHint::PowerDecay(4.0));
    }
}
