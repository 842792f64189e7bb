//! Fields fed to the solution analyzers, built from config recipes.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::domain::field::{DecayHint, ScalarField, Smoothness};
use crate::domain::point::Point;
use crate::domain::polynomial::{MultiIndex, Polynomial};
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::potentials::{DensitySpec, LogPotential};
use crate::solutions::spherical::SphericalSolution;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub alpha: Vec<u32>,
    pub coeff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FixtureSpec {
    Spherical { lambda: f64, center: Option<Vec<f64>> },
    /// `u = v_f + P` with `v_f` the log-potential of `density`. Used to
    /// validate the analyzers; it does not solve the equation.
    Synthetic { density: DensitySpec, polynomial: Vec<PolyTerm> },
    /// `u = P` with zero density.
    Polynomial { polynomial: Vec<PolyTerm> },
    /// `u ≡ -∞`, so `e^{nu} ≡ 0`.
    Vanishing,
}

impl FixtureSpec {
    /// `v_f + 5 - |x|^2` with `f` a unit-mass bump on the unit ball.
    pub fn standard_synthetic(n: usize) -> Self {
        let mut polynomial = vec![PolyTerm { alpha: vec![0; n], coeff: 5.0 }];
        for i in 0..n {
            let mut alpha = vec![0; n];
            alpha[i] = 2;
            polynomial.push(PolyTerm { alpha, coeff: -1.0 });
        }
        FixtureSpec::Synthetic { density: DensitySpec::Bump { center: None, radius: 1.0, mass: 1.0 }, polynomial }
    }
}

fn build_polynomial(n: usize, terms: &[PolyTerm]) -> Result<Polynomial> {
    let mut p = Polynomial::zero(n);
    for t in terms {
        if t.alpha.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: t.alpha.len() });
        }
        let a = MultiIndex(t.alpha.clone());
        let c = p.coeff(&a) + t.coeff;
        p.set(a, c);
    }
    Ok(p)
}

/// Whether `e^{n P}` decays like a Gaussian: degree two with a negative
/// definite quadratic part.
fn gaussian_decay(p: &Polynomial) -> bool {
    if p.degree() != 2 {
        return false;
    }
    let n = p.dim();
    let mut q = DMatrix::<f64>::zeros(n, n);
    for (a, &c) in p.terms() {
        if a.degree() != 2 {
            continue;
        }
        let idx: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat(i).take(a.0[i] as usize)).collect();
        if idx[0] == idx[1] {
            q[(idx[0], idx[0])] += c;
        } else {
            q[(idx[0], idx[1])] += 0.5 * c;
            q[(idx[1], idx[0])] += 0.5 * c;
        }
    }
    q.symmetric_eigenvalues().iter().all(|&l| l < 0.0)
}

/// A candidate `u` together with the right-hand side `f` of
/// `(-Δ)^{n/2} u = f` it is analyzed against and its `e^{nu}`.
#[derive(Clone, Debug)]
pub struct SolutionField {
    pub dim: usize,
    pub label: String,
    pub u: ScalarField,
    /// `(n-1)! e^{nu}` for solutions, the declared density otherwise.
    pub density: ScalarField,
    pub exp_nu: ScalarField,
    /// Whether `u` is an exact solution of the equation.
    pub is_solution: bool,
    /// The polynomial part when it is known by construction.
    pub known_polynomial: Option<Polynomial>,
}

impl SolutionField {
    pub fn spherical(s: &SphericalSolution) -> Self {
        Self {
            dim: s.dim(),
            label: format!("spherical(lambda={})", s.lambda),
            u: s.field(),
            density: s.density(),
            exp_nu: s.exp_nu(),
            is_solution: true,
            known_polynomial: None,
        }
    }

    pub fn from_spec(n: usize, fixture: &FixtureSpec, spec: &QuadratureSpec) -> Result<Self> {
        Ok(match fixture {
            FixtureSpec::Spherical { lambda, center } => {
                let c = center.clone().unwrap_or_else(|| vec![0.0; n]);
                if c.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: c.len() });
                }
                Self::spherical(&SphericalSolution::new(*lambda, Point::new(c)?)?)
            }
            FixtureSpec::Synthetic { density, polynomial } => {
                let f = density.to_field(n)?;
                let p = build_polynomial(n, polynomial)?;
                let lp = LogPotential::new(f.clone(), spec)?;
                let (lp_u, p_u) = (lp.clone(), p.clone());
                let mut u = ScalarField::new(n, move |x: &[f64]| {
                    lp_u.eval(x).map(|e| e.value).unwrap_or(f64::NAN) + p_u.eval(x)
                })
                .with_smoothness(Smoothness::C2)
                .with_decay(if p.degree() == 0 { DecayHint::LogGrowth } else { DecayHint::PolyGrowth(p.degree()) })
                .with_label("synthetic fixture");
                if n >= 3 {
                    // -Δu = -Δv_f - ΔP, second derivatives of v_f by quadrature
                    let q = p.neg_laplacian();
                    let spec = spec.clone();
                    u = u.with_neg_laplacian(move || {
                        let (lp, q, spec) = (lp.clone(), q.clone(), spec.clone());
                        ScalarField::new(n, move |x: &[f64]| {
                            let mut s = q.eval(x);
                            for i in 0..n {
                                let mut a = vec![0; n];
                                a[i] = 2;
                                match lp.derivative(x, &MultiIndex(a), &spec) {
                                    Ok(e) => s -= e.value,
                                    Err(_) => return f64::NAN,
                                }
                            }
                            s
                        })
                        .with_smoothness(Smoothness::C2)
                    });
                }
                let decay = if gaussian_decay(&p) { DecayHint::Schwartz } else { DecayHint::None };
                let exp_nu = u.map_values(move |v| (n as f64 * v).exp()).with_decay(decay);
                Self {
                    dim: n,
                    label: "synthetic fixture (not a solution)".into(),
                    u,
                    density: f,
                    exp_nu,
                    is_solution: false,
                    known_polynomial: Some(p),
                }
            }
            FixtureSpec::Polynomial { polynomial } => {
                let p = build_polynomial(n, polynomial)?;
                let (pu, q) = (p.clone(), p.neg_laplacian());
                let u = ScalarField::new(n, move |x: &[f64]| pu.eval(x))
                    .with_decay(DecayHint::PolyGrowth(p.degree()))
                    .with_neg_laplacian(move || {
                        let q = q.clone();
                        ScalarField::new(n, move |x: &[f64]| q.eval(x))
                    })
                    .with_label("polynomial fixture");
                let decay = if gaussian_decay(&p) { DecayHint::Schwartz } else { DecayHint::None };
                let exp_nu = u.map_values(move |v| (n as f64 * v).exp()).with_decay(decay);
                Self {
                    dim: n,
                    label: "polynomial fixture (zero density)".into(),
                    u,
                    density: ScalarField::zero(n).with_decay(DecayHint::Schwartz),
                    exp_nu,
                    is_solution: false,
                    known_polynomial: Some(p),
                }
            }
            FixtureSpec::Vanishing => Self {
                dim: n,
                label: "vanishing density".into(),
                u: ScalarField::constant(n, f64::NEG_INFINITY),
                density: ScalarField::zero(n).with_decay(DecayHint::Schwartz),
                exp_nu: ScalarField::zero(n).with_decay(DecayHint::Schwartz),
                is_solution: false,
                known_polynomial: None,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fixture_recipes() {
        let f: FixtureSpec = toml::from_str(
            "kind = \"synthetic\"\npolynomial = [{ alpha = [0], coeff = 5.0 }, { alpha = [2], coeff = -1.0 }]\n\
             [density]\nkind = \"bump\"\nradius = 1.0\nmass = 1.0\n",
        )
        .unwrap();
        assert_eq!(f, FixtureSpec::standard_synthetic(1));
        let v: FixtureSpec = serde_json::from_str(r#"{"kind":"vanishing"}"#).unwrap();
        assert_eq!(v, FixtureSpec::Vanishing);
    }

    #[test]
    fn decay_classification() {
        let p = build_polynomial(2, &[PolyTerm { alpha: vec![2, 0], coeff: -1.0 }, PolyTerm { alpha: vec![1, 1], coeff: 0.5 }, PolyTerm { alpha: vec![0, 2], coeff: -1.0 }]).unwrap();
        assert!(gaussian_decay(&p));
        let q = build_polynomial(2, &[PolyTerm { alpha: vec![2, 0], coeff: -1.0 }, PolyTerm { alpha: vec![1, 1], coeff: 3.0 }, PolyTerm { alpha: vec![0, 2], coeff: -1.0 }]).unwrap();
        assert!(!gaussian_decay(&q));
    }
}
