use std::fmt;
use std::sync::Arc;

use crate::domain::point::{dist, Point, MAX_DIM};
use crate::scalar::Real;

/// Regularity class of a field, ordered from weakest to strongest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Smoothness {
    C0,
    C2,
    Smooth,
}

/// Growth or decay of a field at infinity, used to bound truncated tails.
///
/// `PowerDecay(r)` promises `|f(x)| <= C (1 + |x|)^(-r)`, `LogGrowth`
/// promises `|f(x)| <= C (1 + log(1 + |x|))`, `PolyGrowth(d)` promises
/// `|f(x)| <= C (1 + |x|)^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecayHint<T: Real = f64> {
    Schwartz,
    PowerDecay(T),
    LogGrowth,
    PolyGrowth(u32),
    None,
}

impl<T: Real> DecayHint<T> {
    /// Envelope `e(r)` with `|f(z)| <= C e(|z|)` for some constant `C`.
    /// Schwartz fields use a fixed fast power.
    pub fn envelope(&self, r: T) -> Option<T> {
        let one = T::one();
        match *self {
            DecayHint::Schwartz => Some((one + r).powi(-SCHWARTZ_POWER)),
            DecayHint::PowerDecay(p) => Some((one + r).powf(-p)),
            DecayHint::LogGrowth => Some(one + (one + r).ln()),
            DecayHint::PolyGrowth(d) => Some((one + r).powi(d as i32)),
            DecayHint::None => None,
        }
    }

    /// Whether the envelope is nonincreasing in `r`.
    pub fn is_decaying(&self) -> bool {
        match *self {
            DecayHint::Schwartz => true,
            DecayHint::PowerDecay(p) => p >= T::zero(),
            _ => false,
        }
    }

    /// Effective algebraic rate: positive for decay, negative for growth,
    /// `None` when unknown. Logarithmic growth counts as rate 0.
    pub fn algebraic_rate(&self) -> Option<T> {
        match *self {
            DecayHint::Schwartz => Some(T::lit(SCHWARTZ_POWER as f64)),
            DecayHint::PowerDecay(p) => Some(p),
            DecayHint::LogGrowth => Some(T::zero()),
            DecayHint::PolyGrowth(d) => Some(-T::lit(d as f64)),
            DecayHint::None => None,
        }
    }

    /// The weaker of two hints (valid for sums of the fields).
    pub fn weaker(self, other: Self) -> Self {
        use DecayHint::*;
        match (self, other) {
            (None, _) | (_, None) => None,
            (Schwartz, h) | (h, Schwartz) => h,
            (PowerDecay(a), PowerDecay(b)) => PowerDecay(if a < b { a } else { b }),
            (PowerDecay(a), LogGrowth) | (LogGrowth, PowerDecay(a)) => {
                if a >= T::zero() {
                    LogGrowth
                } else {
                    PowerDecay(a)
                }
            }
            (LogGrowth, LogGrowth) => LogGrowth,
            (PolyGrowth(d), PolyGrowth(e)) => PolyGrowth(d.max(e)),
            (PolyGrowth(d), _) | (_, PolyGrowth(d)) => PolyGrowth(d.max(1)),
        }
    }
}

/// Power used as the envelope of Schwartz-class fields.
pub const SCHWARTZ_POWER: i32 = 12;

pub type EvalFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;
pub type FieldGen<T> = Arc<dyn Fn() -> ScalarField<T> + Send + Sync>;

/// An evaluable real function on R^n with metadata used by the quadrature
/// engines: regularity, behavior at infinity, an optional center of radial
/// symmetry, an optional supporting ball, and an optional exact `-Δ`.
#[derive(Clone)]
pub struct ScalarField<T: Real = f64> {
    dim: usize,
    eval: EvalFn<T>,
    smoothness: Smoothness,
    decay: DecayHint<T>,
    radial_center: Option<Vec<T>>,
    support: Option<(Vec<T>, T)>,
    neg_laplacian: Option<FieldGen<T>>,
    label: String,
}

impl<T: Real> fmt::Debug for ScalarField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("smoothness", &self.smoothness)
            .field("decay", &self.decay)
            .field("radial_center", &self.radial_center)
            .field("support", &self.support)
            .field("has_neg_laplacian", &self.neg_laplacian.is_some())
            .finish()
    }
}

impl<T: Real> ScalarField<T> {
    /// Wraps a closure. Defaults: smooth, no decay information, no symmetry.
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[T]) -> T + Send + Sync + 'static,
    {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} unsupported");
        Self {
            dim,
            eval: Arc::new(f),
            smoothness: Smoothness::Smooth,
            decay: DecayHint::None,
            radial_center: None,
            support: None,
            neg_laplacian: None,
            label: String::from("field"),
        }
    }

    /// The zero field (supported on a degenerate ball at the origin).
    pub fn zero(dim: usize) -> Self {
        let mut f = Self::new(dim, |_| T::zero());
        f.decay = DecayHint::Schwartz;
        f.radial_center = Some(vec![T::zero(); dim]);
        f.support = Some((vec![T::zero(); dim], T::zero()));
        f.neg_laplacian = Some(Arc::new(move || ScalarField::zero(dim)));
        f.label = "zero".into();
        f
    }

    pub fn constant(dim: usize, c: T) -> Self {
        if c == T::zero() {
            return Self::zero(dim);
        }
        let mut f = Self::new(dim, move |_| c);
        f.decay = DecayHint::PolyGrowth(0);
        f.radial_center = Some(vec![T::zero(); dim]);
        f.neg_laplacian = Some(Arc::new(move || ScalarField::zero(dim)));
        f.label = format!("constant({c})");
        f
    }

    pub fn with_smoothness(mut self, s: Smoothness) -> Self {
        self.smoothness = s;
        self
    }

    pub fn with_decay(mut self, d: DecayHint<T>) -> Self {
        self.decay = d;
        self
    }

    pub fn with_radial_center(mut self, c: &[T]) -> Self {
        assert_eq!(c.len(), self.dim);
        self.radial_center = Some(c.to_vec());
        self
    }

    pub fn with_support(mut self, center: &[T], radius: T) -> Self {
        assert_eq!(center.len(), self.dim);
        self.support = Some((center.to_vec(), radius));
        self
    }

    pub fn with_neg_laplacian<G>(mut self, gen: G) -> Self
    where
        G: Fn() -> ScalarField<T> + Send + Sync + 'static,
    {
        self.neg_laplacian = Some(Arc::new(gen));
        self
    }

    pub fn without_neg_laplacian(mut self) -> Self {
        self.neg_laplacian = None;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn eval(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.dim);
        (self.eval)(x)
    }

    pub fn eval_point(&self, x: &Point<T>) -> T {
        self.eval(x.coords())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn decay(&self) -> DecayHint<T> {
        self.decay
    }

    pub fn radial_center(&self) -> Option<&[T]> {
        self.radial_center.as_deref()
    }

    pub fn support(&self) -> Option<(&[T], T)> {
        self.support.as_ref().map(|(c, r)| (c.as_slice(), *r))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// A point that the field is organized around: the symmetry center, else
    /// the support center, else `None`.
    pub fn center_hint(&self) -> Option<&[T]> {
        self.radial_center().or(self.support.as_ref().map(|(c, _)| c.as_slice()))
    }

    /// Whether `x` lies outside the closed supporting ball.
    pub fn vanishes_at(&self, x: &[T]) -> bool {
        match &self.support {
            Some((c, r)) => dist(x, c) > *r,
            None => false,
        }
    }

    /// The registered exact `-Δ f`, if any.
    pub fn neg_laplacian(&self) -> Option<ScalarField<T>> {
        self.neg_laplacian.as_ref().map(|g| g())
    }

    /// `(-Δ)^k f` through registered closures.
    pub fn neg_laplacian_power(&self, k: u32) -> Option<ScalarField<T>> {
        let mut g = self.clone();
        for _ in 0..k {
            g = g.neg_laplacian()?;
        }
        Some(g)
    }

    pub fn has_neg_laplacian(&self) -> bool {
        self.neg_laplacian.is_some()
    }

    /// `a * f`.
    pub fn scaled(&self, a: T) -> Self {
        if a == T::zero() {
            return Self::zero(self.dim);
        }
        let inner = self.eval.clone();
        let mut out = self.clone();
        out.eval = Arc::new(move |x| a * inner(x));
        out.neg_laplacian = self.neg_laplacian.clone().map(|g| -> FieldGen<T> {
            Arc::new(move || g().scaled(a))
        });
        out.label = format!("{}*{}", a, self.label);
        out
    }

    /// `a * f + b * g`.
    pub fn linear_combination(a: T, f: &Self, b: T, g: &Self) -> Self {
        assert_eq!(f.dim, g.dim);
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let mut out = Self::new(f.dim, move |x| a * fe(x) + b * ge(x));
        out.smoothness = f.smoothness.min(g.smoothness);
        out.decay = f.decay.weaker(g.decay);
        out.radial_center = match (&f.radial_center, &g.radial_center) {
            (Some(c1), Some(c2)) if c1 == c2 => Some(c1.clone()),
            _ => None,
        };
        out.support = match (&f.support, &g.support) {
            (Some((c1, r1)), Some((c2, r2))) => {
                let d = dist(c1, c2);
                let r = (*r1).max(d + *r2);
                Some((c1.clone(), r))
            }
            _ => None,
        };
        if let (Some(lf), Some(lg)) = (f.neg_laplacian.clone(), g.neg_laplacian.clone()) {
            out.neg_laplacian = Some(Arc::new(move || {
                ScalarField::linear_combination(a, &lf(), b, &lg())
            }));
        }
        out.label = format!("{}*{}+{}*{}", a, f.label, b, g.label);
        out
    }

    /// `x -> f(x - h)`.
    pub fn translated(&self, h: &[T]) -> Self {
        assert_eq!(h.len(), self.dim);
        let inner = self.eval.clone();
        let shift = h.to_vec();
        let mut out = self.clone();
        out.eval = Arc::new(move |x| {
            let mut buf = [T::zero(); MAX_DIM];
            for (i, b) in buf.iter_mut().enumerate().take(x.len()) {
                *b = x[i] - shift[i];
            }
            inner(&buf[..x.len()])
        });
        let add = |c: &Vec<T>| c.iter().zip(h).map(|(&a, &b)| a + b).collect::<Vec<T>>();
        out.radial_center = self.radial_center.as_ref().map(add);
        out.support = self.support.as_ref().map(|(c, r)| (add(c), *r));
        let hv = h.to_vec();
        out.neg_laplacian = self.neg_laplacian.clone().map(|g| -> FieldGen<T> {
            Arc::new(move || g().translated(&hv))
        });
        out.label = format!("{}(.-h)", self.label);
        out
    }

    /// `x -> f(mu x)` for `mu > 0`.
    pub fn dilated(&self, mu: T) -> Self {
        assert!(mu > T::zero());
        let inner = self.eval.clone();
        let mut out = self.clone();
        out.eval = Arc::new(move |x| {
            let mut buf = [T::zero(); MAX_DIM];
            for (i, b) in buf.iter_mut().enumerate().take(x.len()) {
                *b = x[i] * mu;
            }
            inner(&buf[..x.len()])
        });
        out.radial_center = self.radial_center.as_ref().map(|c| c.iter().map(|&v| v / mu).collect());
        out.support = self
            .support
            .as_ref()
            .map(|(c, r)| (c.iter().map(|&v| v / mu).collect(), *r / mu));
        out.neg_laplacian = self.neg_laplacian.clone().map(|g| -> FieldGen<T> {
            Arc::new(move || g().dilated(mu).scaled(mu * mu))
        });
        out.label = format!("{}(mu.)", self.label);
        out
    }

    /// Central-difference partial derivative with step `h` (no closures).
    pub fn partial_fd(&self, axis: usize, h: T) -> Self {
        assert!(axis < self.dim);
        let inner = self.eval.clone();
        let mut out = self.clone();
        out.eval = Arc::new(move |x| {
            let n = x.len();
            let mut buf = [T::zero(); MAX_DIM];
            buf[..n].copy_from_slice(x);
            buf[axis] = x[axis] + h;
            let fp = inner(&buf[..n]);
            buf[axis] = x[axis] - h;
            let fm = inner(&buf[..n]);
            (fp - fm) / (h + h)
        });
        out.radial_center = None;
        out.support = self.support.as_ref().map(|(c, r)| (c.clone(), *r + h));
        out.neg_laplacian = None;
        out.label = format!("d{}({})", axis, self.label);
        out
    }

    /// Replaces the evaluation closure, keeping the metadata but dropping the
    /// registered Laplacian.
    pub fn with_eval<F>(&self, f: F) -> Self
    where
        F: Fn(&[T]) -> T + Send + Sync + 'static,
    {
        let mut out = self.clone();
        out.eval = Arc::new(f);
        out.neg_laplacian = None;
        out
    }

    /// Composes the evaluation with `f`, keeping all other metadata except
    /// the registered Laplacian.
    pub fn map_values<F>(&self, f: F) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        let inner = self.eval.clone();
        let mut out = self.clone();
        out.eval = Arc::new(move |x| f(inner(x)));
        out.neg_laplacian = None;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_field() -> ScalarField<f64> {
        ScalarField::new(2, |x: &[f64]| x[0] * x[0] + 3.0 * x[1])
            .with_neg_laplacian(|| ScalarField::constant(2, -2.0))
    }

    #[test]
    fn combinators_evaluate() {
        let f = quad_field();
        assert_eq!(f.eval(&[2.0, 1.0]), 7.0);
        assert_eq!(f.scaled(2.0).eval(&[2.0, 1.0]), 14.0);
        assert_eq!(f.translated(&[1.0, 0.0]).eval(&[3.0, 1.0]), 7.0);
        assert_eq!(f.dilated(2.0).eval(&[1.0, 0.5]), 7.0);
        let g = ScalarField::linear_combination(1.0, &f, -1.0, &f);
        assert_eq!(g.eval(&[2.0, 1.0]), 0.0);
    }

    #[test]
    fn closures_follow_combinators() {
        let f = quad_field();
        assert_eq!(f.neg_laplacian().unwrap().eval(&[0.0, 0.0]), -2.0);
        assert_eq!(f.dilated(3.0).neg_laplacian().unwrap().eval(&[0.0, 0.0]), -18.0);
        assert_eq!(f.neg_laplacian_power(2).unwrap().eval(&[5.0, 5.0]), 0.0);
        assert!(f.partial_fd(0, 1e-3).neg_laplacian().is_none());
    }

    #[test]
    fn fd_derivative_is_accurate_on_quadratics() {
        let f = quad_field();
        let d = f.partial_fd(0, 1e-3);
        assert!((d.eval(&[1.5, 0.0]) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn decay_hint_ordering() {
        let a: DecayHint<f64> = DecayHint::PowerDecay(2.0);
        assert_eq!(a.weaker(DecayHint::Schwartz), a);
        assert_eq!(a.weaker(DecayHint::LogGrowth), DecayHint::LogGrowth);
        assert_eq!(a.weaker(DecayHint::None), DecayHint::None);
        assert!(a.is_decaying());
        assert!(!DecayHint::<f64>::LogGrowth.is_decaying());
    }
}
