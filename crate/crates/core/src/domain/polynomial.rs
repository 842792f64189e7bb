use std::cmp::Ordering;
use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use crate::domain::point::Point;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Exponent vector of a monomial. Ordered graded-lexicographically: by total
/// degree, then with larger leading exponents first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        Self(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// All multi-indices of dimension `dim` and degree `<= max_degree`, in
    /// graded-lexicographic order.
    pub fn all_up_to(dim: usize, max_degree: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for d in 0..=max_degree {
            out.extend(Self::of_degree(dim, d));
        }
        out
    }

    /// Multi-indices of exactly degree `d`, leading exponents largest first.
    pub fn of_degree(dim: usize, d: u32) -> Vec<Self> {
        fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == dim {
                prefix.push(left);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=left).rev() {
                prefix.push(e);
                rec(dim, left - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(dim, d, &mut Vec::new(), &mut out);
        out
    }

    pub fn monomial<T: Real>(&self, x: &[T]) -> T {
        self.0
            .iter()
            .zip(x)
            .fold(T::one(), |acc, (&e, &xi)| acc * xi.powi(e as i32))
    }

    pub fn to_key(&self) -> String {
        self.0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial on R^n stored as a sparse coefficient map.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T: Real = f64> {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, T>,
}

impl<T: Real> Polynomial<T> {
    pub fn zero(dim: usize) -> Self {
        Self { dim, coeffs: BTreeMap::new() }
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, T)>) -> Self {
        let mut p = Self::zero(dim);
        for (a, c) in terms {
            assert_eq!(a.dim(), dim);
            p.set(a, c);
        }
        p
    }

    pub fn set(&mut self, alpha: MultiIndex, c: T) {
        if c == T::zero() {
            self.coeffs.remove(&alpha);
        } else {
            self.coeffs.insert(alpha, c);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> T {
        self.coeffs.get(alpha).copied().unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.coeffs.iter()
    }

    /// Largest `|alpha|` with a nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.degree_above(T::zero())
    }

    /// Largest `|alpha|` whose coefficient exceeds `threshold` in magnitude.
    pub fn degree_above(&self, threshold: T) -> u32 {
        self.coeffs
            .iter()
            .filter(|(_, c)| c.abs() > threshold)
            .map(|(a, _)| a.degree())
            .max()
            .unwrap_or(0)
    }

    /// `-Δp`, computed term by term.
    pub fn neg_laplacian(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, &c) in &self.coeffs {
            for i in 0..self.dim {
                let e = a.0[i];
                if e >= 2 {
                    let mut b = a.clone();
                    b.0[i] -= 2;
                    let prev = out.coeff(&b);
                    out.set(b, prev - c * T::lit((e * (e - 1)) as f64));
                }
            }
        }
        out
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, (a, &c)| acc + c * a.monomial(x))
    }

    /// Largest coefficient difference against another polynomial.
    pub fn max_coeff_diff(&self, other: &Self) -> T {
        let mut keys: Vec<&MultiIndex> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|a| (self.coeff(a) - other.coeff(a)).abs())
            .fold(T::zero(), T::max)
    }

    /// Canonical JSON: sorted object keys, terms listed in graded-lex order.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .coeffs
            .iter()
            .map(|(a, c)| json!({ "alpha": a.0, "coeff": c.as_f64() }))
            .collect();
        json!({ "degree": self.degree(), "dim": self.dim, "terms": terms })
    }
}

/// Result of a least-squares polynomial fit.
#[derive(Clone, Debug)]
pub struct PolyFit<T: Real = f64> {
    pub poly: Polynomial<T>,
    pub max_residual: T,
}

/// Least-squares fit of a polynomial of degree `<= max_degree`.
pub fn poly_fit<T: Real>(samples: &[(Point<T>, T)], max_degree: u32) -> Result<PolyFit<T>> {
    let dim = samples
        .first()
        .map(|(p, _)| p.dim())
        .ok_or_else(|| Error::InvalidArgument("no samples".into()))?;
    for (p, _) in samples {
        p.check_dim(dim)?;
    }
    let basis = MultiIndex::all_up_to(dim, max_degree);
    let (m, k) = (samples.len(), basis.len());
    if m < k {
        return Err(Error::SingularFit { rank: m, needed: k });
    }
    let mut a = DMatrix::<f64>::zeros(m, k);
    let mut b = DVector::<f64>::zeros(m);
    for (i, (p, v)) in samples.iter().enumerate() {
        let x = p.to_f64_vec();
        for (j, alpha) in basis.iter().enumerate() {
            a[(i, j)] = alpha.monomial(&x);
        }
        b[i] = v.as_f64();
    }
    // Column equilibration keeps the singular-value rank test scale free.
    let scales: Vec<f64> = (0..k)
        .map(|j| {
            let nrm = a.column(j).norm();
            if nrm > 0.0 {
                nrm
            } else {
                1.0
            }
        })
        .collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).unscale_mut(*s);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let cutoff = smax * 1e-11 * (m.max(k) as f64);
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    if rank < k {
        return Err(Error::SingularFit { rank, needed: k });
    }
    let sol = svd
        .solve(&b, cutoff)
        .map_err(|e| Error::InvalidArgument(format!("least squares failed: {e}")))?;
    let resid = &a * &sol - &b;
    let max_residual = resid.iter().fold(0.0_f64, |acc, r| acc.max(r.abs()));
    let poly = Polynomial::from_terms(
        dim,
        basis
            .into_iter()
            .enumerate()
            .map(|(j, alpha)| (alpha, T::lit(sol[j] / scales[j]))),
    );
    Ok(PolyFit { poly, max_residual: T::lit(max_residual) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3(f: impl Fn(&[f64]) -> f64) -> Vec<(Point<f64>, f64)> {
        let mut s = Vec::new();
        for i in -2..=2 {
            for j in -2..=2 {
                for k in -2..=2 {
                    let x = [i as f64 * 0.7, j as f64 * 0.6, k as f64 * 0.5];
                    s.push((Point::from_f64(&x).unwrap(), f(&x)));
                }
            }
        }
        s
    }

    #[test]
    fn graded_lex_order() {
        let idx = MultiIndex::all_up_to(2, 2);
        let keys: Vec<String> = idx.iter().map(|a| a.to_key()).collect();
        assert_eq!(keys, ["0,0", "1,0", "0,1", "2,0", "1,1", "0,2"]);
        let mut sorted = idx.clone();
        sorted.reverse();
        sorted.sort();
        assert_eq!(sorted, idx);
    }

    #[test]
    fn fit_recovers_quadratic() {
        let fit = poly_fit(&grid3(|x| 5.0 - x[0] * x[0]), 2).unwrap();
        assert!(fit.max_residual < 1e-10);
        assert!((fit.poly.coeff(&MultiIndex(vec![0, 0, 0])) - 5.0).abs() < 1e-10);
        assert!((fit.poly.coeff(&MultiIndex(vec![2, 0, 0])) + 1.0).abs() < 1e-10);
        assert_eq!(fit.poly.degree_above(1e-8), 2);
    }

    #[test]
    fn neg_laplacian_of_quadratic_and_cubic() {
        let p = Polynomial::from_terms(
            3,
            [
                (MultiIndex(vec![0, 0, 0]), 5.0),
                (MultiIndex(vec![2, 0, 0]), -1.0),
                (MultiIndex(vec![0, 2, 0]), -1.0),
                (MultiIndex(vec![0, 0, 2]), -1.0),
                (MultiIndex(vec![3, 1, 0]), 2.0),
            ],
        );
        let q = p.neg_laplacian();
        assert_eq!(q.coeff(&MultiIndex(vec![0, 0, 0])), 6.0);
        assert_eq!(q.coeff(&MultiIndex(vec![1, 1, 0])), -12.0);
        assert_eq!(q.degree(), 2);
    }

    #[test]
    fn fit_of_zero_is_zero() {
        let fit = poly_fit(&grid3(|_| 0.0), 2).unwrap();
        assert_eq!(fit.poly.degree(), 0);
        assert!(fit.poly.terms().all(|(_, c)| c.abs() < 1e-14));
    }

    #[test]
    fn degenerate_geometry_is_rejected() {
        let s: Vec<_> = (0..20)
            .map(|i| (Point::from_f64(&[i as f64, 0.0]).unwrap(), 1.0))
            .collect();
        assert!(matches!(poly_fit(&s, 2), Err(Error::SingularFit { .. })));
    }

    #[test]
    fn canonical_json_is_sorted() {
        let p = Polynomial::from_terms(
            1,
            [(MultiIndex(vec![2]), -1.0), (MultiIndex(vec![0]), 5.0)],
        );
        let s = serde_json::to_string(&p.to_json()).unwrap();
        assert_eq!(s, r#"{"degree":2,"dim":1,"terms":[{"alpha":[0],"coeff":5.0},{"alpha":[2],"coeff":-1.0}]}"#);
    }
}
