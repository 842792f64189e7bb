use std::f64::consts::PI;

use proptest::prelude::*;
use qcurv::domain::{DecayHint, FracOrder, MultiIndex, Point, QuadratureSpec, RadialForm, ScalarField};
use qcurv::fraclap::{frac_lap, FracLapOperator, IntegerLapMode};
use qcurv::potentials::*;
use qcurv::quad::{integrate, AdaptiveOptions};
use qcurv::solutions::SphericalSolution;

/// Catalan's constant.
const CATALAN: f64 = 0.915_965_594_177_219_015;

fn spherical_lp(n: usize, spec: &QuadratureSpec) -> LogPotential {
    LogPotential::new(SphericalSolution::<f64>::standard(n).density(), spec).unwrap()
}

#[test]
fn zero_density() {
    let spec = QuadratureSpec::default();
    let lp = LogPotential::new(DensitySpec::Zero.to_field(3).unwrap(), &spec).unwrap();
    assert_eq!(lp.eval(&[1.0, 2.0, 3.0]).unwrap().value, 0.0);
    assert_eq!(lp.mass().value, 0.0);
}

#[test]
fn one_dimensional_spherical_potential() {
    // v(0) = (1/π) ∫ log(1+|y|) 2/(1+y^2) dy = log 2 + 4G/π
    let spec = QuadratureSpec::default();
    let lp = spherical_lp(1, &spec);
    let v0 = lp.eval(&[0.0]).unwrap();
    assert!((v0.value - (2f64.ln() + 4.0 * CATALAN / PI)).abs() < 1e-6, "{v0:?}");
    assert!((lp.mass().value - 2.0 * PI).abs() < 1e-8);
    let s3 = lp.eval(&[1e3]).unwrap().value / 1e3f64.ln();
    let s4 = lp.eval(&[1e4]).unwrap().value / 1e4f64.ln();
    assert!((-2.3..=-1.7).contains(&s3), "{s3}");
    assert!((s4 + 2.0).abs() < (s3 + 2.0).abs(), "{s3} {s4}");
}

#[test]
fn gradient_far_from_a_bump() {
    let spec = QuadratureSpec::default();
    let bump = DensitySpec::Bump { center: None, radius: 1.0, mass: 1.0 }.to_field(3).unwrap();
    let lp = LogPotential::new(bump, &spec).unwrap();
    let g = lp.derivative(&[10.0, 0.0, 0.0], &MultiIndex::unit(3, 0), &spec).unwrap();
    let predicted = 1.0 / (lp.gamma_n() * 10.0);
    assert!(g.value < 0.0 && (g.value.abs() / predicted - 1.0).abs() < 0.1, "{g:?} vs {predicted}");
}

#[test]
fn spherical_gradient_decays() {
    let spec = QuadratureSpec::default();
    let lp = spherical_lp(3, &spec);
    let g: Vec<_> = [10.0, 20.0, 40.0]
        .iter()
        .map(|&r| lp.derivative(&[r, 0.0, 0.0], &MultiIndex::unit(3, 0), &spec).unwrap())
        .collect();
    for w in g.windows(2) {
        assert!(w[1].value.abs() + w[1].err_est < w[0].value.abs() + w[0].err_est, "{g:?}");
    }
    // -2/r to leading order
    assert!((g[2].value * 40.0 + 2.0).abs() < 0.05, "{g:?}");
}

#[test]
fn polyharmonic_kernel_on_the_unit_ball() {
    // Ψ * 1_{B_1} (0) = c ∫_{B_1} |y|^{-1} dy = 2π c
    let spec = QuadratureSpec::default();
    let psi = FundamentalSolution::<f64>::new(KernelKind::PolyHarm, 3).unwrap();
    let ind = ScalarField::new(3, |x: &[f64]| if x.iter().map(|v| v * v).sum::<f64>() < 1.0 { 1.0 } else { 0.0 })
        .with_support(&[0.0; 3], 1.0)
        .with_radial_center(&[0.0; 3]);
    let e = fundamental_convolve(&psi, &ind, &Point::origin(3), &spec).unwrap();
    assert!((e.value - 2.0 * PI * psi.constant()).abs() < 1e-8, "{e:?}");
}

/// `Φ * f` for radial `f` supported in the unit ball of R^3:
/// `(1/(π r)) ∫_0^1 s f(s) log((r+s)/|r-s|) ds`.
fn radial_half_lap_inverse(profile: impl Fn(f64) -> f64 + Copy, r: f64) -> f64 {
    let opts = AdaptiveOptions::new(1e-12, 1e-10, 4000);
    if r == 0.0 {
        // limit: (2/π) ∫ f(s) ds
        return 2.0 / PI * integrate(&mut |s: f64| (profile(s), 0.0), &[0.0, 1.0], opts).value;
    }
    let mut g = |s: f64| (s * profile(s) * ((r + s) / (r - s).abs()).ln(), 0.0);
    let breaks: Vec<f64> = if r < 1.0 { vec![0.0, r, 1.0] } else { vec![0.0, 1.0] };
    integrate(&mut g, &breaks, opts).value / (PI * r)
}

#[test]
fn half_laplacian_inverts_the_fundamental_solution() {
    let spec = QuadratureSpec::default();
    let profile = |s: f64| (1.0 - s * s).max(0.0).powi(4);
    let f = RadialForm::<f64>::bump(3, &[0.0; 3], 1.0, 4, 1.0).to_field();
    let phi = FundamentalSolution::<f64>::new(KernelKind::HalfLap, 3).unwrap();
    // the radial formula agrees with the polar convolution
    for x in [[0.0, 0.0, 0.0], [0.3, 0.1, -0.2], [1.5, 0.5, 0.0]] {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let c = fundamental_convolve(&phi, &f, &Point::from_f64(&x).unwrap(), &spec).unwrap();
        assert!((c.value - radial_half_lap_inverse(profile, r)).abs() < 1e-8, "{x:?}: {c:?}");
    }
    let w = ScalarField::new(3, move |x: &[f64]| radial_half_lap_inverse(profile, x.iter().map(|v| v * v).sum::<f64>().sqrt()))
        .with_decay(DecayHint::PowerDecay(2.0))
        .with_radial_center(&[0.0; 3]);
    let op = FracLapOperator::new(3, FracOrder::new(0, 0.5).unwrap(), IntegerLapMode::AnalyticDerivatives).unwrap();
    let loose = spec.clone().with_rel_tol(1e-5).with_abs_tol(1e-7);
    for x in [[0.1, 0.2, 0.0], [0.5, -0.3, 0.2], [0.0, 0.0, 0.7], [-0.2, 0.4, 0.4], [1.2, 0.0, 0.3]] {
        let v = frac_lap(&op, &w, &Point::from_f64(&x).unwrap(), &loose).unwrap();
        assert!((v.value - f.eval(&x)).abs() < 1e-3, "{x:?}: {v:?} vs {}", f.eval(&x));
    }
}

#[test]
fn exponential_integrability_dichotomy() {
    let spec = QuadratureSpec::default();
    let sweep = bm_sweep(&[1.0, 3.0], &ConcentrationFamily::default(), &spec).unwrap();
    assert!((sweep.threshold - 2.0).abs() < 1e-9);
    assert_eq!(sweep.rows[0].decision, Decision::Converged, "{:?}", sweep.rows[0]);
    assert_eq!(sweep.rows[1].decision, Decision::Diverged, "{:?}", sweep.rows[1]);
    assert!(sweep.rows[0].admissible && !sweep.rows[1].admissible);
    assert_eq!(sweep.transition, Some(2.0));
}

#[test]
fn log_sandwich_for_spherical_densities() {
    let spec = QuadratureSpec::default();
    let radii: Vec<f64> = (1..=12).map(|k| 10f64.powi(k)).collect();
    let lp = spherical_lp(1, &spec);
    let s = sandwich_check(&lp, 2.0, 0.1, &[1.0], &radii).unwrap();
    assert!(s.holds && s.lower_constant.is_finite(), "{s:?}");
    assert!(s.r_epsilon.unwrap() <= 1e12);
    // v + 2 log r stays bounded below
    assert!(s.rows.iter().all(|r| r.offset > -s.lower_constant - 1e-12));
    assert!(sandwich_check(&lp, 2.0, 0.1, &[1.0], &[0.5]).is_err());
}

#[test]
fn weighted_norm_converges_under_doubling() {
    let spec = QuadratureSpec::default();
    let lp = spherical_lp(1, &spec);
    let radii = [500.0, 1000.0, 2000.0];
    let outer = spec.clone().with_rel_tol(1e-6);
    let rep = weighted_norm_check(&lp, &MultiIndex::zero(1), &radii, &outer).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!(rep.integrals.windows(2).all(|w| w[1] >= w[0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn potential_is_linear_in_the_density(a in -2.0f64..2.0, b in -2.0f64..2.0, x in -3.0f64..3.0) {
        let spec = QuadratureSpec::default();
        let f = RadialForm::<f64>::gaussian(1, &[0.0], 1.0, 1.0).to_field();
        let g = RadialForm::<f64>::gaussian(1, &[0.5], 2.0, 1.0).to_field();
        let lf = LogPotential::new(f.clone(), &spec).unwrap().eval(&[x]).unwrap().value;
        let lg = LogPotential::new(g.clone(), &spec).unwrap().eval(&[x]).unwrap().value;
        let lc = LogPotential::new(ScalarField::linear_combination(a, &f, b, &g), &spec).unwrap().eval(&[x]).unwrap().value;
        prop_assert!((lc - (a * lf + b * lg)).abs() < 1e-8 * (1.0 + a.abs() + b.abs()));
    }
}
