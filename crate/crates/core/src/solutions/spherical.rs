//! The explicit solutions `u(x) = log(2λ / (1 + λ^2 |x - x0|^2))`.


use crate::domain::field::{DecayHint, ScalarField};
use crate::domain::geom::factorial;
use crate::domain::point::{dist, Point};
use crate::domain::radial::{Envelope, RadialForm};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct SphericalSolution<T: Real = f64> {
    pub lambda: T,
    pub center: Point<T>,
}

impl<T: Real> SphericalSolution<T> {
    pub fn new(lambda: T, center: Point<T>) -> Result<Self> {
        if !(lambda > T::zero()) {
            return Err(Error::InvalidArgument(format!("lambda {lambda} must be positive")));
        }
        Ok(Self { lambda, center })
    }

    /// `λ = 1`, centered at the origin.
    pub fn standard(n: usize) -> Self {
        Self { lambda: T::one(), center: Point::origin(n) }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn u(&self, x: &[T]) -> T {
        let r = dist(x, self.center.coords());
        let l = self.lambda;
        (T::lit(2.0) * l / (T::one() + l * l * r * r)).ln()
    }

    /// `∇u = -2 λ^2 (x - x0) / (1 + λ^2 |x - x0|^2)`.
    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        let c = self.center.coords();
        let l2 = self.lambda * self.lambda;
        let r = dist(x, c);
        let q = T::lit(-2.0) * l2 / (T::one() + l2 * r * r);
        x.iter().zip(c).map(|(&xi, &ci)| q * (xi - ci)).collect()
    }

    /// `-Δu = 2 λ^2 (n + (n - 2) λ^2 s) / (1 + λ^2 s)^2`.
    pub fn neg_laplacian_form(&self) -> RadialForm<T> {
        let n = T::lit(self.dim() as f64);
        let l2 = self.lambda * self.lambda;
        let two = T::lit(2.0);
        RadialForm::new(
            self.dim(),
            self.center.coords(),
            vec![two * l2 * n, two * l2 * l2 * (n - two)],
            Envelope::Rational { b: l2, m: 2 },
        )
    }

    /// `u` with its exact `-Δ` closures registered.
    pub fn field(&self) -> ScalarField<T> {
        let me = self.clone();
        let lap = self.neg_laplacian_form();
        ScalarField::new(self.dim(), move |x: &[T]| me.u(x))
            .with_decay(DecayHint::LogGrowth)
            .with_radial_center(self.center.coords())
            .with_neg_laplacian(move || lap.to_field())
            .with_label(format!("spherical(lambda={})", self.lambda))
    }

    /// `e^(n u) = (2λ / (1 + λ^2 s))^n` as a radial form.
    pub fn exp_nu_form(&self) -> RadialForm<T> {
        let n = self.dim();
        let l = self.lambda;
        RadialForm::new(
            n,
            self.center.coords(),
            vec![(T::lit(2.0) * l).powi(n as i32)],
            Envelope::Rational { b: l * l, m: n as u32 },
        )
    }

    pub fn exp_nu(&self) -> ScalarField<T> {
        self.exp_nu_form().to_field().with_label("e^(nu)")
    }

    /// `(n-1)! e^(n u)`, the right-hand side of the equation.
    pub fn density(&self) -> ScalarField<T> {
        let c = factorial::<T>(self.dim() as u32 - 1);
        self.exp_nu().scaled(c).with_label("(n-1)! e^(nu)")
    }

    pub fn rhs(&self, x: &[T]) -> T {
        let n = self.dim();
        factorial::<T>(n as u32 - 1) * (T::lit(n as f64) * self.u(x)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closures_match_finite_differences() {
        let s = SphericalSolution::<f64>::new(2.0, Point::from_f64(&[1.0, 1.0, 1.0]).unwrap()).unwrap();
        let f = s.field();
        let x = [1.3, 0.4, 1.9];
        let h = 1e-4;
        let mut lap = 0.0;
        for i in 0..3 {
            let mut p = x;
            let mut m = x;
            p[i] += h;
            m[i] -= h;
            lap += (f.eval(&p) + f.eval(&m) - 2.0 * f.eval(&x)) / (h * h);
            let g = (f.eval(&p) - f.eval(&m)) / (2.0 * h);
            assert!((g - s.gradient(&x)[i]).abs() < 1e-7);
        }
        let exact = f.neg_laplacian().unwrap().eval(&x);
        assert!((lap + exact).abs() < 1e-5, "{lap} {exact}");
        assert!((s.rhs(&[1.0, 1.0, 1.0]) - 128.0).abs() < 1e-12);
        assert!((s.density().eval(&x) - s.rhs(&x)).abs() < 1e-12);
    }
}
