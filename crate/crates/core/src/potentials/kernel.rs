//! Exact partial derivatives of `log |z|` as sums of `c z^β |z|^(-2m)`.

use std::collections::BTreeMap;

use crate::domain::polynomial::MultiIndex;
use crate::scalar::Real;

/// One term `coef * z^beta * s^(-m)` with `s = |z|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelTerm<T: Real> {
    pub coef: T,
    pub beta: Vec<u32>,
    pub m: u32,
}

/// `D^α log|z|` for `|α| >= 1`, by repeated differentiation starting from
/// `∂_i log|z| = z_i / s`.
#[derive(Clone, Debug)]
pub struct LogKernelDerivative<T: Real> {
    terms: Vec<KernelTerm<T>>,
    order: u32,
}

impl<T: Real> LogKernelDerivative<T> {
    pub fn new(alpha: &MultiIndex) -> Self {
        let n = alpha.dim();
        let mut axes = Vec::new();
        for (i, &k) in alpha.0.iter().enumerate() {
            axes.extend(std::iter::repeat(i).take(k as usize));
        }
        let order = axes.len() as u32;
        if axes.is_empty() {
            return Self { terms: Vec::new(), order };
        }
        // integer coefficients keyed by (beta, m)
        let mut cur: BTreeMap<(Vec<u32>, u32), i64> = BTreeMap::new();
        let mut b = vec![0u32; n];
        b[axes[0]] = 1;
        cur.insert((b, 1), 1);
        for &i in &axes[1..] {
            let mut next: BTreeMap<(Vec<u32>, u32), i64> = BTreeMap::new();
            for ((beta, m), c) in cur {
                if beta[i] > 0 {
                    let mut b1 = beta.clone();
                    b1[i] -= 1;
                    *next.entry((b1, m)).or_insert(0) += c * beta[i] as i64;
                }
                let mut b2 = beta.clone();
                b2[i] += 1;
                *next.entry((b2, m + 1)).or_insert(0) -= 2 * c * m as i64;
            }
            next.retain(|_, c| *c != 0);
            cur = next;
        }
        let terms = cur
            .into_iter()
            .map(|((beta, m), c)| KernelTerm { coef: T::lit(c as f64), beta, m })
            .collect();
        Self { terms, order }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &[KernelTerm<T>] {
        &self.terms
    }

    /// Value at `z != 0`.
    pub fn eval(&self, z: &[T]) -> T {
        let s: T = z.iter().map(|&v| v * v).sum();
        let mut acc = T::zero();
        for t in &self.terms {
            let mut mono = t.coef;
            for (zi, &bi) in z.iter().zip(&t.beta) {
                if bi > 0 {
                    mono = mono * zi.powi(bi as i32);
                }
            }
            acc = acc + mono * s.powi(-(t.m as i32));
        }
        acc
    }

    /// `C` with `|D^α log|z|| <= C |z|^(-|α|)`.
    pub fn magnitude_bound(&self) -> T {
        self.terms.iter().map(|t| t.coef.abs()).sum()
    }
}
