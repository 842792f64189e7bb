use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation, tolerance and budget settings for every integration routine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Radius beyond which integrals are replaced by certified tail bounds.
    pub truncation_radius: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of dyadic radial shells below the truncation radius.
    pub max_subdivisions: u32,
    /// Order of the fixed product rules on spheres.
    pub angular_order: u32,
    pub mc_samples: u64,
    pub seed: u64,
    /// When set, a field without usable decay information is an error rather
    /// than an uncertified truncation.
    pub certify_tails: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            truncation_radius: 16_777_216.0,
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_subdivisions: 40,
            angular_order: 16,
            mc_samples: 20_000,
            seed: 0x5eed_2024,
            certify_tails: true,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.truncation_radius > 0.0 && self.truncation_radius.is_finite()) {
            return bad("truncation_radius must be positive and finite");
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return bad("rel_tol and abs_tol must be positive");
        }
        if self.max_subdivisions == 0 || self.max_subdivisions > 200 {
            return bad("max_subdivisions must lie in 1..=200");
        }
        if self.angular_order == 0 || self.angular_order > 256 {
            return bad("angular_order must lie in 1..=256");
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mc_samples(mut self, n: u64) -> Self {
        self.mc_samples = n;
        self
    }

    pub fn with_truncation_radius(mut self, r: f64) -> Self {
        self.truncation_radius = r;
        self
    }

    /// Innermost shell radius `2^-max_subdivisions * R`.
    pub fn inner_radius(&self) -> f64 {
        self.truncation_radius * 0.5_f64.powi(self.max_subdivisions as i32)
    }

    /// Panel budget of a radial adaptive integration.
    pub fn radial_budget(&self) -> usize {
        (self.max_subdivisions as usize) * 60
    }

    /// Panel budget of a polar-angle adaptive integration.
    pub fn angular_budget(&self) -> usize {
        400
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_partial_toml_and_json() {
        let s: QuadratureSpec = toml::from_str("rel_tol = 1e-6\nseed = 7").unwrap();
        assert_eq!(s.rel_tol, 1e-6);
        assert_eq!(s.seed, 7);
        assert_eq!(s.angular_order, QuadratureSpec::default().angular_order);
        let j: QuadratureSpec = serde_json::from_str(r#"{"max_subdivisions": 12}"#).unwrap();
        assert_eq!(j.max_subdivisions, 12);
        assert!(serde_json::from_str::<QuadratureSpec>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(QuadratureSpec::default().validate().is_ok());
        assert!(QuadratureSpec::default().with_rel_tol(0.0).validate().is_err());
        assert!(QuadratureSpec::default().with_truncation_radius(-1.0).validate().is_err());
    }
}
