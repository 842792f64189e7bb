//! Globally adaptive Gauss–Kronrod integration with deterministic bisection.

use crate::quad::gauss::{gk21, GkPanel};
use crate::scalar::{compensated_sum, Real};

/// Tolerances and panel budget of one adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct AdaptiveOptions<T: Real> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_panels: usize,
}

impl<T: Real> AdaptiveOptions<T> {
    pub fn new(abs_tol: T, rel_tol: T, max_panels: usize) -> Self {
        Self { abs_tol, rel_tol, max_panels }
    }
}

/// Outcome of a one-dimensional integration.
#[derive(Clone, Copy, Debug)]
pub struct Quad1d<T: Real> {
    pub value: T,
    /// Discretization error estimate plus the integrated auxiliary error.
    pub err: T,
    pub abs_value: T,
    pub panels: usize,
    pub converged: bool,
}

impl<T: Real> Quad1d<T> {
    pub fn zero() -> Self {
        Self { value: T::zero(), err: T::zero(), abs_value: T::zero(), panels: 0, converged: true }
    }
}

struct Panel<T: Real> {
    a: T,
    b: T,
    r: GkPanel<T>,
    splittable: bool,
}

/// Multiple of machine epsilon times `∫|f|` treated as converged.
pub const ROUNDOFF_FLOOR: f64 = 200.0;

/// Integrates `f` over the interval spanned by the sorted `breaks` (at least
/// two points). `f` returns `(value, aux)` where `aux` is a nonnegative error
/// density that is integrated alongside and added to the reported error.
pub fn integrate<T: Real, F: FnMut(T) -> (T, T)>(
    f: &mut F,
    breaks: &[T],
    opts: AdaptiveOptions<T>,
) -> Quad1d<T> {
    let mut pts: Vec<T> = breaks.iter().copied().filter(|v| v.is_finite()).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 2 {
        return Quad1d::zero();
    }
    let tiny = T::lit(64.0) * T::epsilon();
    let mut panels: Vec<Panel<T>> = Vec::with_capacity(opts.max_panels.max(pts.len()));
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= tiny * a.abs().max(b.abs()) {
            continue;
        }
        panels.push(Panel { a, b, r: gk21(f, a, b), splittable: true });
    }
    if panels.is_empty() {
        return Quad1d::zero();
    }
    loop {
        let value = compensated_sum(panels.iter().map(|p| p.r.value));
        let err = compensated_sum(panels.iter().map(|p| p.r.err));
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        // below the rounding floor of the Kronrod rule no refinement helps
        let floor = T::lit(ROUNDOFF_FLOOR) * T::epsilon() * compensated_sum(panels.iter().map(|p| p.r.abs_value));
        if err <= target || err <= floor {
            return finish(&panels, value, err, true);
        }
        if panels.len() >= opts.max_panels {
            return finish(&panels, value, err, false);
        }
        // worst splittable panel; ties resolved by position
        let mut worst: Option<usize> = None;
        for (i, p) in panels.iter().enumerate() {
            if !p.splittable {
                continue;
            }
            match worst {
                Some(j) if panels[j].r.err >= p.r.err => {}
                _ => worst = Some(i),
            }
        }
        let Some(i) = worst else {
            return finish(&panels, value, err, false);
        };
        let (a, b) = (panels[i].a, panels[i].b);
        let m = T::lit(0.5) * (a + b);
        if m - a <= tiny * a.abs().max(m.abs()) || b - m <= tiny * b.abs().max(m.abs()) {
            panels[i].splittable = false;
            continue;
        }
        let left = gk21(f, a, m);
        let right = gk21(f, m, b);
        panels[i] = Panel { a, b: m, r: left, splittable: true };
        panels.push(Panel { a: m, b, r: right, splittable: true });
    }
}

fn finish<T: Real>(panels: &[Panel<T>], value: T, err: T, converged: bool) -> Quad1d<T> {
    let aux = compensated_sum(panels.iter().map(|p| p.r.aux));
    let abs_value = compensated_sum(panels.iter().map(|p| p.r.abs_value));
    Quad1d { value, err: err + aux, abs_value, panels: panels.len(), converged }
}

/// Geometric breakpoints `lo, 2 lo, 4 lo, ...` capped at `hi` (inclusive).
pub fn dyadic_breaks<T: Real>(lo: T, hi: T) -> Vec<T> {
    let mut out = vec![lo];
    let two = T::lit(2.0);
    let mut r = lo * two;
    while r < hi {
        out.push(r);
        r = r * two;
    }
    out.push(hi);
    out
}

/// Merges extra breakpoints that fall strictly inside `(lo, hi)`.
pub fn merge_breaks<T: Real>(mut base: Vec<T>, extra: &[T], lo: T, hi: T) -> Vec<T> {
    base.extend(extra.iter().copied().filter(|&v| v > lo && v < hi && v.is_finite()));
    base.sort_by(|a, b| a.partial_cmp(b).unwrap());
    base.dedup();
    base
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> AdaptiveOptions<f64> {
        AdaptiveOptions::new(1e-13, 1e-12, 500)
    }

    #[test]
    fn endpoint_singularity() {
        let mut f = |x: f64| (x.sqrt().recip(), 0.0);
        let q = integrate(&mut f, &[0.0, 1.0], opts());
        assert!((q.value - 2.0).abs() < 1e-9, "{q:?}");
        assert!((q.value - 2.0).abs() <= q.err.max(1e-12));
    }

    #[test]
    fn interior_kink_with_breakpoint() {
        let mut f = |x: f64| ((x - 0.3).abs(), 0.0);
        let q = integrate(&mut f, &[-1.0, 0.3, 1.0], opts());
        assert!(q.converged);
        assert!((q.value - 0.5 * (1.69 + 0.49)).abs() < 1e-14);
    }

    #[test]
    fn log_singularity_and_aux_channel() {
        let mut f = |x: f64| (-x.ln(), 1e-9);
        let q = integrate(&mut f, &dyadic_breaks(1e-12, 1.0), opts());
        assert!((q.value - 1.0).abs() < 1e-10);
        assert!(q.err >= 1e-9 * 0.99);
    }

    #[test]
    fn deterministic() {
        let run = || {
            let mut f = |x: f64| ((10.0 * x).sin() * (-x).exp(), 0.0);
            integrate(&mut f, &[0.0, 7.0], opts()).value
        };
        assert_eq!(run().to_bits(), run().to_bits());
    }
}
