//! Declarative run configuration, read from TOML or JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::potentials::{ConcentrationFamily, DensitySpec};
use crate::solutions::FixtureSpec;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    pub residual: Option<ResidualSection>,
    pub potential: Option<PotentialSection>,
    pub asymptotics: Option<AsymptoticsSection>,
    pub scaling: Option<ScalingSection>,
    pub green: Option<GreenSection>,
    pub estimates: Option<EstimatesSection>,
    pub bm: Option<BmSection>,
    pub constants: Option<ConstantsSection>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualSection {
    pub field: Option<FixtureSpec>,
    pub points: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub density: Option<DensitySpec>,
    pub radii: Option<Vec<f64>>,
    pub direction: Option<Vec<f64>>,
    /// Multi-indices of the derivatives sampled along the ray.
    pub derivatives: Option<Vec<Vec<u32>>>,
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsSection {
    pub field: Option<FixtureSpec>,
    pub window: Option<(f64, f64)>,
    pub radii: Option<usize>,
    /// Whether to fit the decay of every derivative of `v`.
    pub derivative_decay: Option<bool>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    pub j: Option<u32>,
    pub sigma: Option<f64>,
    pub radii: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenSection {
    pub radius: Option<f64>,
    /// Number of random right-hand sides in the maximum principle check.
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatesSection {
    pub window: Option<(f64, f64)>,
    /// Subset of `schwartz`, `moment`, `support`, `riesz`.
    pub kinds: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BmSection {
    pub ps: Option<Vec<f64>>,
    pub family: Option<ConcentrationFamily>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    pub sigmas: Option<Vec<f64>>,
}

impl RunConfig {
    /// Reads a config; `.json` files are JSON, everything else TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg: RunConfig = if is_json {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        cfg.quadrature.validate()?;
        Ok(cfg)
    }
}

/// Parses `1,2,4` into numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Config(format!("bad number '{t}': {e}"))))
        .collect()
}

/// Parses `0,0,0;1,0,0` into points.
pub fn parse_points(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(parse_list).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let t: RunConfig = toml::from_str(
            "n = 3\n[quadrature]\nrel_tol = 1e-8\n[residual]\npoints = [[0.0, 0.0, 0.0]]\n\
             [residual.field]\nkind = \"spherical\"\nlambda = 2.0\n",
        )
        .unwrap();
        let j: RunConfig = serde_json::from_str(
            r#"{"n":3,"quadrature":{"rel_tol":1e-8},"residual":{"points":[[0,0,0]],"field":{"kind":"spherical","lambda":2.0}}}"#,
        )
        .unwrap();
        assert_eq!(serde_json::to_string(&t).unwrap(), serde_json::to_string(&j).unwrap());
        assert_eq!(t.quadrature.rel_tol, 1e-8);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("dimension = 3").is_err());
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list("1, 2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        assert_eq!(parse_points("0,0;1,2").unwrap(), vec![vec![0.0, 0.0], vec![1.0, 2.0]]);
        assert!(parse_list("1,x").is_err());
    }
}
