//! Named densities that can be selected from configuration files.

use serde::{Deserialize, Serialize};

use crate::domain::field::{DecayHint, ScalarField};
use crate::domain::geom::{factorial, gamma_half, sphere_area};
use crate::domain::point::Point;
use crate::domain::radial::RadialForm;
use crate::error::{Error, Result};
use crate::solutions::SphericalSolution;

/// Power of the built-in bump `(1 - |x-c|²/r²)_+^BUMP_POWER`.
pub const BUMP_POWER: u32 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    /// `(n-1)! e^{n u}` for the spherical solution with these parameters.
    Spherical { lambda: f64, center: Option<Vec<f64>> },
    /// `amplitude * exp(-a |x - c|²)`.
    Gaussian { a: f64, amplitude: f64, center: Option<Vec<f64>> },
    /// Polynomial bump of the given total mass.
    Bump { center: Option<Vec<f64>>, radius: f64, mass: f64 },
    Zero,
}

fn center_of(c: &Option<Vec<f64>>, n: usize) -> Result<Vec<f64>> {
    match c {
        None => Ok(vec![0.0; n]),
        Some(v) if v.len() == n => Ok(v.clone()),
        Some(v) => Err(Error::DimensionMismatch { expected: n, got: v.len() }),
    }
}

/// Radial bump of total mass `mass`.
pub fn bump_density(center: &[f64], radius: f64, mass: f64) -> Result<ScalarField<f64>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("bump radius {radius} must be positive")));
    }
    let n = center.len() as u32;
    let k = BUMP_POWER;
    let beta = gamma_half::<f64>(n) * factorial::<f64>(k) / gamma_half::<f64>(n + 2 * k + 2);
    let unit = sphere_area::<f64>(n - 1) * radius.powi(n as i32) * beta / 2.0;
    Ok(RadialForm::bump(center.len(), center, radius, k, mass / unit).to_field().with_label("bump"))
}

impl DensitySpec {
    pub fn to_field(&self, n: usize) -> Result<ScalarField<f64>> {
        Ok(match self {
            DensitySpec::Spherical { lambda, center } => {
                SphericalSolution::new(*lambda, Point::new(center_of(center, n)?)?)?.density()
            }
            DensitySpec::Gaussian { a, amplitude, center } => {
                if !(*a > 0.0) {
                    return Err(Error::InvalidArgument("gaussian rate must be positive".into()));
                }
                RadialForm::gaussian(n, &center_of(center, n)?, *a, *amplitude).to_field().with_label("gaussian")
            }
            DensitySpec::Bump { center, radius, mass } => bump_density(&center_of(center, n)?, *radius, *mass)?,
            DensitySpec::Zero => ScalarField::zero(n).with_decay(DecayHint::Schwartz).with_label("zero"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tagged_specs() {
        let d: DensitySpec = serde_json::from_str(r#"{"kind":"bump","radius":0.5,"mass":2.0,"center":null}"#).unwrap();
        assert_eq!(d, DensitySpec::Bump { center: None, radius: 0.5, mass: 2.0 });
        let s: DensitySpec = toml::from_str("kind = \"spherical\"\nlambda = 2.0").unwrap();
        assert_eq!(s, DensitySpec::Spherical { lambda: 2.0, center: None });
    }
}
