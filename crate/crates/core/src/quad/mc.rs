//! Seeded Monte Carlo for nested integrals over a ball.
//!
//! `∫_B ... ∫_B K_0(x, z_1) K_1(z_1, z_2) ... K_m(z_m, y) dz_1 ... dz_m`
//! is estimated with every `z_i` drawn from a defensive mixture of the
//! uniform law on the ball and two laws concentrated like `|z - p|^(1/2 - n)`
//! at the endpoints, which keeps the variance finite for kernels as singular
//! as `|z - p|^(2-n)`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::domain::geom::{ball_volume, sphere_area};
use crate::domain::point::{dist, MAX_DIM};
use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};

pub type PairKernel<T = f64> = Arc<dyn Fn(&[T], &[T]) -> T + Send + Sync>;

/// Samples drawn per independent generator stream.
pub const BLOCK: u64 = 4096;
/// Resampling attempts per sample before giving up on a coincident point.
const MAX_RETRIES: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McResult<T: Real = f64> {
    pub value: T,
    pub stderr: T,
    pub samples: u64,
    /// Draws rejected because kernel arguments coincided or the integrand was
    /// not finite.
    pub resampled: u64,
}

struct Sampler<'a> {
    n: usize,
    center: &'a [f64],
    radius: f64,
    anchors: [&'a [f64]; 2],
    ball_vol: f64,
    area: f64,
}

impl Sampler<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let n = self.n;
        let pick: u32 = rng.gen_range(0..3);
        let mut dir = [0.0f64; MAX_DIM];
        loop {
            let mut s = 0.0f64;
            for d in dir.iter_mut().take(n) {
                *d = rng.sample(StandardNormal);
                s += *d * *d;
            }
            if s > 0.0 {
                let s = s.sqrt();
                dir.iter_mut().take(n).for_each(|d| *d /= s);
                break;
            }
        }
        let u: f64 = rng.gen();
        match pick {
            0 => {
                let rho = self.radius * u.powf(1.0 / n as f64);
                for i in 0..n {
                    out[i] = self.center[i] + rho * dir[i];
                }
            }
            k => {
                let p = self.anchors[k as usize - 1];
                let rho = 2.0 * self.radius * u * u;
                for i in 0..n {
                    out[i] = p[i] + rho * dir[i];
                }
            }
        }
    }

    fn density(&self, z: &[f64]) -> f64 {
        let n = self.n;
        let mut p = 1.0 / self.ball_vol;
        let two_r = 2.0 * self.radius;
        for a in self.anchors {
            let rho = dist(z, a);
            if rho > 0.0 && rho <= two_r {
                let p_rho = 0.5 / (two_r * rho).sqrt();
                p += p_rho / (self.area * rho.powi(n as i32 - 1));
            }
        }
        p / 3.0
    }
}

/// Estimates the nested integral of `head` followed by `chain` between the
/// endpoints `x` and `y` over the ball `B(center, radius)`. With an empty
/// chain the result is `head(x, y)` with zero standard error.
#[allow(clippy::too_many_arguments)]
pub fn nested_mc_integral<T: Real>(
    head: &PairKernel<T>,
    chain: &[PairKernel<T>],
    x: &[T],
    y: &[T],
    center: &[T],
    radius: T,
    samples: u64,
    seed: u64,
) -> Result<McResult<T>> {
    let n = x.len();
    if y.len() != n || center.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len().min(center.len()) });
    }
    if chain.is_empty() {
        return Ok(McResult { value: head(x, y), stderr: T::zero(), samples: 0, resampled: 0 });
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
    }
    if !(radius > T::zero()) {
        return Err(Error::InvalidArgument("ball radius must be positive".into()));
    }
    let xf: Vec<f64> = x.iter().map(|v| v.as_f64()).collect();
    let yf: Vec<f64> = y.iter().map(|v| v.as_f64()).collect();
    let cf: Vec<f64> = center.iter().map(|v| v.as_f64()).collect();
    let sampler = Sampler {
        n,
        center: &cf,
        radius: radius.as_f64(),
        anchors: [&xf, &yf],
        ball_vol: ball_volume::<f64>(n as u32) * radius.as_f64().powi(n as i32),
        area: sphere_area::<f64>(n as u32 - 1),
    };
    let folds = chain.len();
    let r2 = radius.as_f64() * radius.as_f64();
    let blocks = samples.div_ceil(BLOCK);
    let partial: Vec<(CompensatedSum<f64>, CompensatedSum<f64>, u64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BLOCK.min(samples - b * BLOCK);
            let mut sum = CompensatedSum::new();
            let mut sq = CompensatedSum::new();
            let mut rejected = 0u64;
            let mut zf = vec![[0.0f64; MAX_DIM]; folds];
            let mut zt = vec![[T::zero(); MAX_DIM]; folds];
            for _ in 0..count {
                let mut tries = 0;
                let v = loop {
                    let mut weight = 1.0;
                    let mut inside = true;
                    for k in 0..folds {
                        sampler.draw(&mut rng, &mut zf[k][..n]);
                        let d2: f64 = (0..n).map(|i| (zf[k][i] - cf[i]).powi(2)).sum();
                        if d2 > r2 {
                            inside = false;
                        }
                        weight /= sampler.density(&zf[k][..n]);
                        for i in 0..n {
                            zt[k][i] = T::lit(zf[k][i]);
                        }
                    }
                    if !inside {
                        break 0.0;
                    }
                    let mut coincident = dist(&xf, &zf[0][..n]) == 0.0 || dist(&zf[folds - 1][..n], &yf) == 0.0;
                    for k in 1..folds {
                        coincident |= dist(&zf[k - 1][..n], &zf[k][..n]) == 0.0;
                    }
                    let mut prod = T::one();
                    if !coincident {
                        prod = head(x, &zt[0][..n]);
                        for k in 0..folds {
                            let next = if k + 1 < folds { &zt[k + 1][..n] } else { y };
                            prod = prod * chain[k](&zt[k][..n], next);
                        }
                    }
                    let v = prod.as_f64() * weight;
                    if !coincident && v.is_finite() {
                        break v;
                    }
                    rejected += 1;
                    tries += 1;
                    if tries >= MAX_RETRIES {
                        break f64::NAN;
                    }
                };
                sum.add(v);
                sq.add(v * v);
            }
            (sum, sq, rejected)
        })
        .collect();
    let mut sum = CompensatedSum::new();
    let mut sq = CompensatedSum::new();
    let mut resampled = 0;
    for (s, q, r) in partial {
        sum.add(s.value());
        sq.add(q.value());
        resampled += r;
    }
    let m = samples as f64;
    let mean = sum.value() / m;
    if !mean.is_finite() {
        return Err(Error::CoincidentPoints);
    }
    let var = ((sq.value() / m - mean * mean) * m / (m - 1.0).max(1.0)).max(0.0);
    Ok(McResult { value: T::lit(mean), stderr: T::lit((var / m).sqrt()), samples, resampled })
}
