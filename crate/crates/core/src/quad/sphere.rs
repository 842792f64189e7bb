//! Quadrature on unit spheres.

use crate::domain::geom::sphere_area;
use crate::domain::point::MAX_DIM;
use crate::quad::adaptive::{integrate, AdaptiveOptions};
use crate::quad::gauss::gauss_legendre;
use crate::scalar::Real;

/// Fixed product rule on `S^m` embedded in R^(m+1).
///
/// `S^0` is the pair `{+1, -1}`; `S^1` the uniform trapezoid rule with `2N`
/// points; higher spheres a Gauss rule in `t = cos θ` for the weight
/// `(1 - t^2)^((m-2)/2)` times the rule on `S^(m-1)`.
#[derive(Clone, Debug)]
pub struct SphereRule<T: Real> {
    ambient: usize,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> SphereRule<T> {
    pub fn new(m: usize, order: usize) -> Self {
        let order = order.max(1);
        match m {
            0 => Self { ambient: 1, nodes: vec![T::one(), -T::one()], weights: vec![T::one(), T::one()] },
            1 => {
                let k = 2 * order;
                let w = T::lit(2.0) * T::PI() / T::lit(k as f64);
                let mut nodes = Vec::with_capacity(2 * k);
                for j in 0..k {
                    let phi = T::lit(2.0) * T::PI() * (T::lit(j as f64) + T::lit(0.5)) / T::lit(k as f64);
                    nodes.push(phi.cos());
                    nodes.push(phi.sin());
                }
                Self { ambient: 2, nodes, weights: vec![w; k] }
            }
            2 => {
                let circle = SphereRule::<T>::new(1, order);
                let (t, wt) = gauss_legendre::<T>(order);
                let mut nodes = Vec::new();
                let mut weights = Vec::new();
                for (ti, wi) in t.iter().zip(&wt) {
                    let st = (T::one() - *ti * *ti).max(T::zero()).sqrt();
                    for (eta, we) in circle.iter() {
                        nodes.push(*ti);
                        nodes.push(st * eta[0]);
                        nodes.push(st * eta[1]);
                        weights.push(*wi * we);
                    }
                }
                Self { ambient: 3, nodes, weights }
            }
            _ => {
                // t = cos θ carries the weight (1 - t^2)^((m-2)/2): Gauss–Legendre
                // absorbs integer powers, Chebyshev nodes of the second kind the
                // half-integer ones
                let sub = SphereRule::<T>::new(m - 1, order);
                let (t, wt) = if m % 2 == 0 {
                    let (t, w) = gauss_legendre::<T>(order);
                    let p = (m as i32 - 2) / 2;
                    let w = t.iter().zip(&w).map(|(&ti, &wi)| wi * (T::one() - ti * ti).powi(p)).collect::<Vec<_>>();
                    (t, w)
                } else {
                    let k1 = T::lit(order as f64 + 1.0);
                    let p = (m as i32 - 3) / 2;
                    (1..=order)
                        .map(|k| {
                            let a = T::PI() * T::lit(k as f64) / k1;
                            let (s, c) = a.sin_cos();
                            (c, T::PI() / k1 * s * s * (s * s).powi(p))
                        })
                        .unzip()
                };
                let mut nodes = Vec::new();
                let mut weights = Vec::new();
                for (ti, wi) in t.iter().zip(&wt) {
                    let st = (T::one() - *ti * *ti).max(T::zero()).sqrt();
                    for (eta, we) in sub.iter() {
                        nodes.push(*ti);
                        for &e in eta {
                            nodes.push(st * e);
                        }
                        weights.push(*wi * we);
                    }
                }
                Self { ambient: m + 1, nodes, weights }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[T], T)> + '_ {
        self.nodes.chunks(self.ambient).zip(self.weights.iter().copied())
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().copied().sum()
    }
}

/// Orthonormal frame `(a, e_2, ..., e_n)` with prescribed first axis.
#[derive(Clone, Debug)]
pub struct Frame<T: Real> {
    dim: usize,
    axis: Vec<T>,
    perp: Vec<Vec<T>>,
}

impl<T: Real> Frame<T> {
    /// Builds a frame around `axis` (normalized; falls back to `e_1` if zero).
    pub fn new(axis: &[T]) -> Self {
        let dim = axis.len();
        let nrm = axis.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
        let a: Vec<T> = if nrm > T::zero() {
            axis.iter().map(|&v| v / nrm).collect()
        } else {
            let mut e = vec![T::zero(); dim];
            e[0] = T::one();
            e
        };
        let mut basis: Vec<Vec<T>> = vec![a.clone()];
        // Gram–Schmidt over the coordinate axes, least aligned first.
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&i, &j| a[i].abs().partial_cmp(&a[j].abs()).unwrap().then(i.cmp(&j)));
        for &k in &order {
            if basis.len() == dim {
                break;
            }
            let mut v = vec![T::zero(); dim];
            v[k] = T::one();
            for b in &basis {
                let d = b.iter().zip(&v).fold(T::zero(), |acc, (&x, &y)| acc + x * y);
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi = *vi - d * bi;
                }
            }
            let n = v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
            if n > T::lit(1e-8) {
                basis.push(v.into_iter().map(|x| x / n).collect());
            }
        }
        let perp = basis.split_off(1);
        Self { dim, axis: a, perp }
    }

    pub fn axis(&self) -> &[T] {
        &self.axis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes `cos θ a + sin θ Σ η_k e_(k+2)` into `out`.
    #[inline]
    pub fn direction(&self, cos_t: T, sin_t: T, eta: &[T], out: &mut [T]) {
        for i in 0..self.dim {
            let mut v = cos_t * self.axis[i];
            for (k, e) in eta.iter().enumerate() {
                v = v + sin_t * *e * self.perp[k][i];
            }
            out[i] = v;
        }
    }
}

/// Integration over `S^(n-1)` organized around a polar axis: an adaptive
/// Gauss–Kronrod rule in the polar angle and either a collapsed sub-sphere
/// (axisymmetric integrands) or a fixed product rule on `S^(n-2)`.
#[derive(Clone, Debug)]
pub struct AngularIntegrator<T: Real> {
    frame: Frame<T>,
    sub_rule: Option<SphereRule<T>>,
    sub_area: T,
    rel_tol: T,
    abs_tol: T,
    budget: usize,
}

/// Result of one sphere integration.
#[derive(Clone, Copy, Debug)]
pub struct AngularResult<T: Real> {
    pub value: T,
    pub err: T,
    pub abs_value: T,
}

impl<T: Real> AngularIntegrator<T> {
    pub fn new(axis: &[T], axisymmetric: bool, order: usize, rel_tol: T, abs_tol: T, budget: usize) -> Self {
        let n = axis.len();
        let frame = Frame::new(axis);
        let sub_rule = if n >= 2 && !axisymmetric { Some(SphereRule::new(n - 2, order)) } else { None };
        let sub_area = if n >= 2 { sphere_area::<T>(n as u32 - 2) } else { T::zero() };
        Self { frame, sub_rule, sub_area, rel_tol, abs_tol, budget }
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn frame(&self) -> &Frame<T> {
        &self.frame
    }

    /// `∫_{θ ≥ theta_lo} F(ω) dω` with θ measured from the axis.
    pub fn integrate<F: FnMut(&[T]) -> T>(&self, f: &mut F, theta_lo: T) -> AngularResult<T> {
        self.integrate_with_err(&mut |w: &[T]| (f(w), T::zero()), theta_lo)
    }

    /// As [`integrate`](Self::integrate) for integrands that carry their own
    /// error estimate, which is integrated and added to the result error.
    pub fn integrate_with_err<F: FnMut(&[T]) -> (T, T)>(&self, f: &mut F, theta_lo: T) -> AngularResult<T> {
        let n = self.frame.dim();
        let mut w = [T::zero(); MAX_DIM];
        if n == 1 {
            let a = self.frame.axis()[0];
            let mut value = T::zero();
            let mut abs_value = T::zero();
            let mut err = T::zero();
            // θ = 0 is the axis direction, θ = π its opposite.
            if theta_lo <= T::zero() {
                w[0] = a;
                let (v, e) = f(&w[..1]);
                value = value + v;
                abs_value = abs_value + v.abs();
                err = err + e;
            }
            if theta_lo < T::PI() {
                w[0] = -a;
                let (v, e) = f(&w[..1]);
                value = value + v;
                abs_value = abs_value + v.abs();
                err = err + e;
            }
            return AngularResult { value, err, abs_value };
        }
        if theta_lo >= T::PI() {
            return AngularResult { value: T::zero(), err: T::zero(), abs_value: T::zero() };
        }
        let e2 = {
            let mut e = [T::zero(); MAX_DIM];
            e[0] = T::one();
            e
        };
        let frame = &self.frame;
        let sub = &self.sub_rule;
        let sub_area = self.sub_area;
        let mut g = |theta: T| -> (T, T) {
            let (s, c) = theta.sin_cos();
            let jac = if n == 2 { T::one() } else { s.powi(n as i32 - 2) };
            let (inner, inner_err) = match sub {
                None => {
                    frame.direction(c, s, &e2[..n - 1], &mut w[..n]);
                    let (v, e) = f(&w[..n]);
                    (sub_area * v, sub_area * e)
                }
                Some(rule) => {
                    let mut acc = T::zero();
                    let mut acc_err = T::zero();
                    for (eta, wt) in rule.iter() {
                        frame.direction(c, s, eta, &mut w[..n]);
                        let (v, e) = f(&w[..n]);
                        acc = acc + wt * v;
                        acc_err = acc_err + wt * e;
                    }
                    (acc, acc_err)
                }
            };
            (jac * inner, jac * inner_err)
        };
        let lo = theta_lo.max(T::zero());
        let mid = T::FRAC_PI_2();
        let breaks: Vec<T> = if lo < mid { vec![lo, mid, T::PI()] } else { vec![lo, T::PI()] };
        let q = integrate(&mut g, &breaks, AdaptiveOptions::new(self.abs_tol, self.rel_tol, self.budget));
        AngularResult { value: q.value, err: q.err, abs_value: q.abs_value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::geom::sphere_area;

    #[test]
    fn rule_weights_reproduce_sphere_areas() {
        for m in 0..=5usize {
            let rule = SphereRule::<f64>::new(m, 12);
            let exact = sphere_area::<f64>(m as u32);
            assert!((rule.total_weight() - exact).abs() < 1e-12 * exact, "m={m}");
            for (x, _) in rule.iter() {
                let r: f64 = x.iter().map(|v| v * v).sum();
                assert!((r - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rule_integrates_low_degree_harmonics() {
        // ∫_{S^2} x^2 = 4π/3, ∫_{S^4} x_1^2 x_2^2 = |S^4| / 35
        let r2 = SphereRule::<f64>::new(2, 8);
        let q: f64 = r2.iter().map(|(x, w)| w * x[1] * x[1]).sum();
        assert!((q - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-13);
        let r4 = SphereRule::<f64>::new(4, 10);
        let q: f64 = r4.iter().map(|(x, w)| w * x[0] * x[0] * x[3] * x[3]).sum();
        assert!((q - sphere_area::<f64>(4) / 35.0).abs() < 1e-12);
    }

    #[test]
    fn frame_is_orthonormal() {
        let f = Frame::<f64>::new(&[0.3, -0.4, 0.5, 0.1, 0.2]);
        let mut vs = vec![f.axis().to_vec()];
        vs.extend(f.perp.iter().cloned());
        assert_eq!(vs.len(), 5);
        for i in 0..5 {
            for j in 0..5 {
                let d: f64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn angular_integrator_with_cap() {
        // area of {θ ≥ θ0} on S^2 is 2π(1 + cos θ0)
        let ai = AngularIntegrator::<f64>::new(&[0.0, 0.0, 1.0], true, 8, 1e-13, 1e-15, 200);
        let r = ai.integrate(&mut |_| 1.0, 0.7);
        assert!((r.value - 2.0 * std::f64::consts::PI * (1.0 + 0.7f64.cos())).abs() < 1e-12);
        // non-axisymmetric integrand with full sub-rule: ∫ x_1^2 = 4π/3
        let full = AngularIntegrator::<f64>::new(&[0.0, 0.0, 1.0], false, 8, 1e-13, 1e-15, 200);
        let r = full.integrate(&mut |w| w[0] * w[0], 0.0);
        assert!((r.value - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
        let one = AngularIntegrator::<f64>::new(&[1.0], true, 8, 1e-13, 1e-15, 200);
        assert_eq!(one.integrate(&mut |w| w[0] + 2.0, 0.0).value, 4.0);
        assert_eq!(one.integrate(&mut |w| w[0] + 2.0, 0.5).value, 1.0);
    }
}
