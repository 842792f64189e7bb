//! Exponential integrability of log-potentials on balls: `∫_{B_R} e^{np|u₂|}`
//! under grid refinement, the Jensen bound, and the concentration sweep
//! across the threshold `p = γ_n / ‖f‖₁`.

use serde::Serialize;

use crate::domain::field::{ScalarField, Smoothness};
use crate::domain::geom::{ball_volume, factorial, gamma_half, geom_constants, sphere_area};
use crate::domain::point::{norm, MAX_DIM};
use crate::domain::radial::RadialForm;
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::potentials::logpot::LogPotential;
use crate::quad::gauss::gauss_legendre;
use crate::quad::polar::ball_exit;
use crate::quad::sphere::{AngularIntegrator, SphereRule};
use crate::quad::volume::{truncated_integral, Domain};

/// Minimum number of refinements before a decision is made.
pub const MIN_REFINEMENTS: usize = 3;
/// Convergence is declared when the last ratio lies within this band of 1.
pub const CONVERGENCE_BAND: f64 = 0.05;
/// Divergence is declared when the last three ratios are all at least this.
pub const DIVERGENCE_RATIO: f64 = 1.2;

const GL_NODES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Converged,
    Diverged,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementLevel {
    pub level: u32,
    pub nodes: usize,
    /// Width of the density at this level (concentration family only).
    pub width: Option<f64>,
    pub integral: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpIntegrability {
    pub dim: usize,
    pub p: f64,
    pub radius: f64,
    /// `‖f‖₁`.
    pub mass: f64,
    /// `γ_n / ‖f‖₁` (infinite for `f = 0`).
    pub threshold: f64,
    pub admissible: bool,
    /// Integral on the finest grid.
    pub integral: f64,
    /// Jensen bound for the finest-level density (infinite when the exponent
    /// `np‖f‖₁/γ_n` reaches `n`).
    pub jensen_bound: f64,
    pub levels: Vec<RefinementLevel>,
    pub ratios: Vec<f64>,
    pub decision: Decision,
}

/// Applies the refinement decision rule to a sequence of integrals.
pub fn decide(integrals: &[f64]) -> Decision {
    if integrals.len() < MIN_REFINEMENTS + 1 || integrals.iter().any(|v| !v.is_finite()) {
        return Decision::Undecided;
    }
    let ratios: Vec<f64> = integrals.windows(2).map(|w| w[1] / w[0]).collect();
    let last = ratios[ratios.len() - 1];
    if (last - 1.0).abs() <= CONVERGENCE_BAND {
        return Decision::Converged;
    }
    if ratios[ratios.len() - 3..].iter().all(|&r| r >= DIVERGENCE_RATIO) {
        return Decision::Diverged;
    }
    Decision::Undecided
}

/// A quadrature grid on `B_R(0)`: points and weights.
struct Grid {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

/// Composite Gauss rule on radial panels, times a sphere rule (or the
/// sphere area alone when `radial_only`).
fn polar_grid(n: usize, breaks: &[f64], sphere_order: Option<usize>) -> Grid {
    let (x, w) = gauss_legendre::<f64>(GL_NODES);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let area = sphere_area::<f64>(n as u32 - 1);
    let rule = sphere_order.map(|o| SphereRule::<f64>::new(n - 1, o));
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        for (xi, wi) in x.iter().zip(&w) {
            let rho = m + h * xi;
            let jac = h * wi * rho.powi(n as i32 - 1);
            match &rule {
                None => {
                    let mut p = vec![0.0; n];
                    p[0] = rho;
                    points.push(p);
                    weights.push(area * jac);
                }
                Some(rule) => {
                    for (om, ow) in rule.iter() {
                        points.push(om.iter().map(|&c| rho * c).collect());
                        weights.push(ow * jac);
                    }
                }
            }
        }
    }
    Grid { points, weights }
}

fn integrate_exp(lp: &LogPotential<f64>, grid: &Grid, ps: &[f64]) -> Result<Vec<f64>> {
    let n = lp.dim() as f64;
    let u: Vec<f64> = lp
        .eval_many(&grid.points)
        .into_iter()
        .map(|r| r.map(|e| e.value))
        .collect::<Result<_>>()?;
    Ok(ps
        .iter()
        .map(|&p| grid.weights.iter().zip(&u).map(|(w, v)| w * (n * p * v.abs()).exp()).sum())
        .collect())
}

/// `∫_{B_R} max(a/|x-y|, |x-y|/a)^q dx` with `a = 1 + |y|`, for `|y| < R`.
fn jensen_inner(y: &[f64], radius: f64, q: f64, angular: &AngularIntegrator<f64>) -> f64 {
    let n = y.len();
    let nf = n as f64;
    let a = 1.0 + norm(y);
    let radial = |b: f64| -> f64 {
        if b <= a {
            a.powf(q) * b.powf(nf - q) / (nf - q)
        } else {
            a.powf(nf) / (nf - q) + a.powf(-q) * (b.powf(nf + q) - a.powf(nf + q)) / (nf + q)
        }
    };
    let origin = [0.0; MAX_DIM];
    angular.integrate(&mut |w: &[f64]| radial(ball_exit(y, &origin[..n], radius, w)), 0.0).value
}

/// Jensen bound `(1/‖f‖) ∫ |f(y)| ∫_{B_R} max(a/|x-y|, |x-y|/a)^q dx dy`
/// with `q = np‖f‖/γ_n`. It coincides with the bound through
/// `((1+|y|)/|x-y|)^q` whenever `R <= 1`.
pub fn jensen_bound(f: &ScalarField<f64>, radius: f64, p: f64, spec: &QuadratureSpec) -> Result<f64> {
    let n = f.dim();
    let gamma = geom_constants::<f64>(n)?.gamma_n;
    let abs_f = f.map_values(f64::abs);
    let mass = truncated_integral(&abs_f, &Domain::ball(&vec![0.0; n], radius), spec)?.value;
    if mass == 0.0 {
        return Ok(ball_volume::<f64>(n as u32) * radius.powi(n as i32));
    }
    let q = n as f64 * p * mass / gamma;
    if q >= n as f64 {
        return Ok(f64::INFINITY);
    }
    let ff = abs_f.clone();
    let g = abs_f.with_eval(move |y: &[f64]| {
        let v = ff.eval(y);
        if v == 0.0 {
            return 0.0;
        }
        let mut axis = vec![0.0; y.len()];
        let ny = norm(y);
        if ny > 0.0 {
            for i in 0..y.len() {
                axis[i] = y[i] / ny;
            }
        } else {
            axis[0] = 1.0;
        }
        let ang = AngularIntegrator::new(&axis, true, 16, 1e-10, 1e-300, 400);
        v * jensen_inner(y, radius, q, &ang)
    });
    let g = g.with_smoothness(Smoothness::C0);
    let outer = truncated_integral(&g, &Domain::ball(&vec![0.0; n], radius), spec)?;
    Ok(outer.value / mass)
}

fn support_radius(f: &ScalarField<f64>) -> Result<f64> {
    match f.support() {
        Some((c, s)) => Ok(norm(c) + s),
        None => Err(Error::InvalidArgument("density must declare a supporting ball".into())),
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent p = {p} must be positive")));
    }
    Ok(())
}

/// `∫_{B_R} e^{np|u₂|}` for the log-potential `u₂` of a fixed density
/// supported in `B_R(0)`, on `levels + 1` successively doubled grids.
pub fn exp_integrability_bound(f: &ScalarField<f64>, p: f64, levels: u32, spec: &QuadratureSpec) -> Result<ExpIntegrability> {
    check_p(p)?;
    let n = f.dim();
    let radius = support_radius(f)?;
    let lp = LogPotential::new(f.clone(), spec)?;
    let mass = truncated_integral(&f.map_values(f64::abs), &Domain::FullSpace, spec)?.value;
    let radial = f.radial_center().is_some_and(|c| norm(c) == 0.0);
    let mut out = Vec::new();
    for level in 0..=levels.max(MIN_REFINEMENTS as u32) {
        let panels = 4usize << level;
        let mut breaks: Vec<f64> = (0..=panels).map(|k| radius * k as f64 / panels as f64).collect();
        if n == 1 && !radial {
            breaks = (0..=2 * panels).map(|k| -radius + radius * k as f64 / panels as f64).collect();
        }
        let grid = if n == 1 && !radial {
            let (x, w) = gauss_legendre::<f64>(GL_NODES);
            let mut g = Grid { points: Vec::new(), weights: Vec::new() };
            for pair in breaks.windows(2) {
                let (m, h) = (0.5 * (pair[0] + pair[1]), 0.5 * (pair[1] - pair[0]));
                for (xi, wi) in x.iter().zip(&w) {
                    g.points.push(vec![m + h * xi]);
                    g.weights.push(h * wi);
                }
            }
            g
        } else {
            polar_grid(n, &breaks, if radial { None } else { Some(4usize << level) })
        };
        let v = integrate_exp(&lp, &grid, &[p])?[0];
        out.push(RefinementLevel { level, nodes: grid.points.len(), width: None, integral: v });
    }
    finish(n, p, radius, mass, jensen_bound(f, radius, p, spec)?, out)
}

fn finish(n: usize, p: f64, radius: f64, mass: f64, jensen: f64, levels: Vec<RefinementLevel>) -> Result<ExpIntegrability> {
    let gamma = geom_constants::<f64>(n)?.gamma_n;
    let threshold = if mass > 0.0 { gamma / mass } else { f64::INFINITY };
    let integrals: Vec<f64> = levels.iter().map(|l| l.integral).collect();
    let ratios = integrals.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(ExpIntegrability {
        dim: n,
        p,
        radius,
        mass,
        threshold,
        admissible: p < threshold,
        integral: *integrals.last().unwrap(),
        jensen_bound: jensen,
        levels,
        ratios,
        decision: decide(&integrals),
    })
}

/// Radial bumps of fixed mass centered at the origin whose width halves at
/// each refinement level, with the grid graded toward the concentration
/// point.
#[derive(Clone, Debug, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcentrationFamily {
    pub dim: usize,
    /// Mass of every member; `None` means `γ_n / 2`.
    pub mass: Option<f64>,
    pub base_width: f64,
    pub radius: f64,
    pub power: u32,
    pub levels: u32,
}

impl Default for ConcentrationFamily {
    fn default() -> Self {
        Self { dim: 1, mass: None, base_width: 0.25, radius: 1.0, power: 4, levels: 12 }
    }
}

impl ConcentrationFamily {
    pub fn mass_value(&self) -> Result<f64> {
        Ok(match self.mass {
            Some(m) => m,
            None => geom_constants::<f64>(self.dim)?.gamma_n / 2.0,
        })
    }

    pub fn width(&self, level: u32) -> f64 {
        self.base_width * 0.5f64.powi(level as i32)
    }

    /// Member at `level`: `A (1 - |x|²/w²)_+^power` with `A` set by the mass.
    pub fn member(&self, level: u32) -> Result<ScalarField<f64>> {
        let n = self.dim as u32;
        let w = self.width(level);
        let k = self.power;
        // ∫ (1 - |x|²/w²)^k = |S^{n-1}| w^n B(n/2, k+1) / 2
        let beta = gamma_half::<f64>(n) * factorial::<f64>(k) / gamma_half::<f64>(n + 2 * k + 2);
        let unit_mass = sphere_area::<f64>(n - 1) * w.powi(n as i32) * beta / 2.0;
        let amp = self.mass_value()? / unit_mass;
        Ok(RadialForm::bump(self.dim, &vec![0.0; self.dim], w, k, amp).to_field())
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(Error::InvalidDimension(self.dim));
        }
        if !(self.base_width > 0.0 && self.radius > self.base_width) {
            return Err(Error::InvalidArgument("need 0 < base_width < radius".into()));
        }
        if (self.levels as usize) < MIN_REFINEMENTS {
            return Err(Error::InvalidArgument(format!("at least {MIN_REFINEMENTS} refinement levels required")));
        }
        Ok(())
    }
}

/// Runs the concentration family once and evaluates every `p` on the same
/// potentials.
pub fn bm_refinement(ps: &[f64], family: &ConcentrationFamily, spec: &QuadratureSpec) -> Result<Vec<ExpIntegrability>> {
    for &p in ps {
        check_p(p)?;
    }
    family.validate()?;
    let n = family.dim;
    let mass = family.mass_value()?;
    let mut per_p: Vec<Vec<RefinementLevel>> = vec![Vec::new(); ps.len()];
    let mut last_member = None;
    for level in 0..=family.levels {
        let w = family.width(level);
        let f = family.member(level)?;
        let lp = LogPotential::new(f.clone(), spec)?;
        let mut breaks = vec![0.0, w / 8.0, w / 4.0, w / 2.0, w];
        let mut r = w;
        while r < family.radius {
            r = (2.0 * r).min(family.radius);
            breaks.push(r);
        }
        let grid = polar_grid(n, &breaks, None);
        let vals = integrate_exp(&lp, &grid, ps)?;
        for (i, v) in vals.into_iter().enumerate() {
            per_p[i].push(RefinementLevel { level, nodes: grid.points.len(), width: Some(w), integral: v });
        }
        last_member = Some(f);
    }
    let f = last_member.expect("at least one level");
    ps.iter()
        .zip(per_p)
        .map(|(&p, levels)| finish(n, p, family.radius, mass, jensen_bound(&f, family.radius, p, spec)?, levels))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BmSweep {
    pub threshold: f64,
    pub rows: Vec<ExpIntegrability>,
    /// Largest `p` declared convergent below the first divergent one.
    pub last_converged: Option<f64>,
    pub first_diverged: Option<f64>,
    /// Midpoint of the two, the empirical threshold.
    pub transition: Option<f64>,
}

pub fn bm_sweep(ps: &[f64], family: &ConcentrationFamily, spec: &QuadratureSpec) -> Result<BmSweep> {
    let mut sorted = ps.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let rows = bm_refinement(&sorted, family, spec)?;
    let first_diverged = rows.iter().find(|r| r.decision == Decision::Diverged).map(|r| r.p);
    let last_converged = rows
        .iter()
        .filter(|r| r.decision == Decision::Converged && first_diverged.is_none_or(|d| r.p < d))
        .map(|r| r.p)
        .last();
    let transition = match (last_converged, first_diverged) {
        (Some(a), Some(b)) => Some(0.5 * (a + b)),
        _ => None,
    };
    let threshold = geom_constants::<f64>(family.dim)?.gamma_n / family.mass_value()?;
    Ok(BmSweep { threshold, rows, last_converged, first_diverged, transition })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decision_rule() {
        assert_eq!(decide(&[1.0, 1.1, 1.12, 1.13]), Decision::Converged);
        assert_eq!(decide(&[1.0, 1.3, 1.7, 2.3]), Decision::Diverged);
        assert_eq!(decide(&[1.0, 1.1, 1.2, 1.3]), Decision::Undecided);
        assert_eq!(decide(&[1.0, 1.0]), Decision::Undecided);
    }

    #[test]
    fn zero_density_integrates_to_ball_volume() {
        let f = ScalarField::<f64>::zero(1).with_support(&[0.0], 2.0);
        let r = exp_integrability_bound(&f, 1.5, 3, &QuadratureSpec::default()).unwrap();
        assert!((r.integral - 4.0).abs() < 1e-12);
        assert!(r.admissible);
        assert!((r.jensen_bound - 4.0).abs() < 1e-12);
        assert_eq!(r.decision, Decision::Converged);
    }

    #[test]
    fn family_mass_is_exact() {
        let fam = ConcentrationFamily::default();
        let f = fam.member(3).unwrap();
        let m = truncated_integral(&f, &Domain::FullSpace, &QuadratureSpec::default()).unwrap().value;
        assert!((m - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn nonpositive_p_rejected() {
        let f = ScalarField::<f64>::zero(1).with_support(&[0.0], 1.0);
        assert!(exp_integrability_bound(&f, 0.0, 3, &QuadratureSpec::default()).is_err());
    }
}
