//! Log-log exponent fits shared by the decay validators.

use serde::Serialize;

use crate::error::{Error, Result};

/// Samples per decade of radius.
pub const SAMPLES_PER_DECADE: f64 = 6.0;
/// Smallest `r_max / r_min` accepted for a fit window.
pub const MIN_WINDOW_RATIO: f64 = 4.0;
/// Exponent tolerance for deterministic fits.
pub const EXPONENT_TOLERANCE: f64 = 0.10;

/// Log-spaced radii covering `[r_min, r_max]` with at least six samples per
/// decade (and never fewer than six).
pub fn log_radii(window: (f64, f64)) -> Result<Vec<f64>> {
    let (a, b) = window;
    if !(a > 0.0 && b > a) {
        return Err(Error::InvalidArgument(format!("window ({a}, {b}) must satisfy 0 < r_min < r_max")));
    }
    let ratio = b / a;
    if ratio < MIN_WINDOW_RATIO {
        return Err(Error::WindowTooNarrow { ratio, min_ratio: MIN_WINDOW_RATIO });
    }
    let m = ((SAMPLES_PER_DECADE * ratio.log10()).ceil() as usize + 1).max(6);
    Ok((0..m).map(|i| a * ratio.powf(i as f64 / (m - 1) as f64)).collect())
}

/// Least-squares line through `(log r, log |v|)`.
#[derive(Clone, Debug, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// `log|v_i| - (intercept + slope log r_i)`.
    pub residuals: Vec<f64>,
}

pub fn loglog_fit(radii: &[f64], values: &[f64]) -> Result<LogLogFit> {
    if radii.len() != values.len() || radii.len() < 2 {
        return Err(Error::InvalidArgument("a log-log fit needs at least two paired samples".into()));
    }
    if let Some(v) = values.iter().find(|v| !(v.abs() > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("cannot take the logarithm of sample {v}")));
    }
    let lx: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ly: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = lx.iter().zip(&ly).map(|(a, b)| b - intercept - slope * a).collect();
    Ok(LogLogFit { slope, intercept, residuals })
}

/// Outcome of one exponent recovery. Exponents are decay rates: a sample
/// behaving like `r^(-p)` has exponent `p`.
#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub fitted_exponent: f64,
    pub predicted_exponent: f64,
    pub window: (f64, f64),
    /// Largest `|value| r^predicted` over the samples.
    pub max_ratio: f64,
    pub tolerance: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub err_ests: Vec<f64>,
    pub residuals: Vec<f64>,
    pub pass: bool,
}

impl DecayReport {
    pub fn from_samples(
        radii: Vec<f64>,
        values: Vec<f64>,
        err_ests: Vec<f64>,
        predicted: f64,
        tolerance: f64,
    ) -> Result<Self> {
        let fit = loglog_fit(&radii, &values)?;
        let fitted = -fit.slope;
        let max_ratio = radii.iter().zip(&values).map(|(r, v)| v.abs() * r.powf(predicted)).fold(0.0, f64::max);
        let window = (radii[0], *radii.last().unwrap());
        let pass = ((fitted - predicted) / predicted).abs() <= tolerance && max_ratio.is_finite();
        Ok(Self {
            fitted_exponent: fitted,
            predicted_exponent: predicted,
            window,
            max_ratio,
            tolerance,
            radii,
            values,
            err_ests,
            residuals: fit.residuals,
            pass,
        })
    }

    /// Rows `r, value, err_est` for CSV export.
    pub fn rows(&self) -> Vec<[f64; 3]> {
        self.radii.iter().zip(&self.values).zip(&self.err_ests).map(|((r, v), e)| [*r, *v, *e]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_density_and_narrow_windows() {
        let r = log_radii((5.0, 40.0)).unwrap();
        assert_eq!(r.len(), 7);
        assert!((r[6] - 40.0).abs() < 1e-12);
        assert_eq!(log_radii((100.0, 10000.0)).unwrap().len(), 13);
        assert!(matches!(log_radii((1.0, 3.0)), Err(Error::WindowTooNarrow { .. })));
    }

    #[test]
    fn exact_power_law() {
        let r = log_radii((1.0, 100.0)).unwrap();
        let v: Vec<f64> = r.iter().map(|x| 3.0 * x.powf(-2.5)).collect();
        let rep = DecayReport::from_samples(r, v, vec![0.0; 13], 2.5, 0.1).unwrap();
        assert!((rep.fitted_exponent - 2.5).abs() < 1e-12);
        assert!((rep.max_ratio - 3.0).abs() < 1e-12);
        assert!(rep.pass);
    }
}
