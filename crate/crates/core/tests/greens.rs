use std::f64::consts::PI;

use proptest::prelude::*;
use qcurv::domain::{DecayHint, FracOrder, Point, QuadratureSpec, ScalarField};
use qcurv::fraclap::{frac_lap, FracLapOperator, IntegerLapMode};
use qcurv::greens::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_inside(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-r..r)).collect();
        if p.iter().map(|v| v * v).sum::<f64>().sqrt() < r {
            return p;
        }
    }
}

#[test]
fn g1_is_symmetric_positive_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [3usize, 5] {
        let pairs: Vec<(Vec<f64>, Vec<f64>)> =
            (0..1000).map(|_| (random_inside(&mut rng, n, 1.5), random_inside(&mut rng, n, 1.5))).collect();
        for (x, y) in pairs.iter().take(100) {
            let a = g1_eval(1.5, x, y).unwrap();
            let b = g1_eval(1.5, y, x).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} {b}");
        }
        let (ratio, min) = g1_bound_ratio(1.5, &pairs).unwrap();
        assert!(min > 0.0);
        // G_1 |x-y|^{n-2} never exceeds the free-space constant
        assert!(ratio <= g1_constant(n) * (1.0 + 1e-12), "n={n}: {ratio}");
    }
}

#[test]
fn g1_vanishes_toward_the_boundary() {
    let x = [0.2, 0.1, 0.0];
    let vals: Vec<f64> = (1..=10).map(|k| g1_eval(1.0, &x, &[0.0, 0.0, 1.0 - 0.1f64.powf(1.0 + k as f64 / 10.0)]).unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]));
    // linear vanishing in the distance to the sphere
    assert!(vals[9] < 0.2 * vals[0]);
    let slope: Vec<f64> = (1..=10).map(|k| vals[k - 1] / 0.1f64.powf(1.0 + k as f64 / 10.0)).collect();
    assert!((slope[9] / slope[8] - 1.0).abs() < 0.05, "{slope:?}");
}

#[test]
fn iterated_green_reductions_and_single_fold() {
    let spec = QuadratureSpec::default();
    let x = [0.1, 0.2, -0.1];
    let y = [-0.3, 0.0, 0.2];
    let a = iterated_green(1.0, 0, &x, &y, &spec).unwrap();
    assert_eq!(a.value, g1_eval(1.0, &x, &y).unwrap());
    assert_eq!(a.stderr, 0.0);
    let x5 = [0.1, 0.2, -0.1, 0.0, 0.1];
    let y5 = [-0.3, 0.0, 0.2, 0.1, 0.0];
    assert_eq!(iterated_green(1.0, 1, &x5, &y5, &spec).unwrap().value, g1_eval(1.0, &x5, &y5).unwrap());
    assert!(iterated_green(1.0, 2, &x5, &y5, &spec).is_err());
    // ∫ G_1(0,z) G_1(z,y) dz = c (|y|^{-1}/2 + |y|^2/10 - 3/5) on the unit ball in 5-D
    let y = [0.5, 0.0, 0.0, 0.0, 0.0];
    let mc = iterated_green(1.0, 0, &[0.0; 5], &y, &spec).unwrap();
    let exact = g1_constant(5) * (1.0 + 0.025 - 0.6);
    assert!((mc.value - exact).abs() < 3.0 * mc.stderr, "{mc:?} vs {exact}");
    let again = iterated_green(1.0, 0, &[0.0; 5], &y, &spec).unwrap();
    assert_eq!(mc.value.to_bits(), again.value.to_bits());
}

#[test]
fn derivative_exponents() {
    let spec = QuadratureSpec::default();
    let rep = green_derivative_bound_check(1.0, 0, &[(vec![0.1, 0.2, 0.0], vec![0.5, -0.2, 0.3])], &spec).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!((rep.sequences[0].fitted_exponent + 2.0).abs() < 0.2);
    // far regime: the first separation is comparable to the radius
    assert!(rep.max_constant.is_finite() && rep.max_constant > 0.0);
    let top = green_derivative_bound_check(1.0, 1, &[(vec![0.1, 0.2, 0.0, 0.0, 0.1], vec![0.5, -0.2, 0.3, 0.0, 0.0])], &spec)
        .unwrap();
    assert_eq!(top.folds, 0);
    assert!(top.pass && (top.sequences[0].fitted_exponent + 4.0).abs() < 0.4);
    let folded = green_derivative_bound_check(1.0, 0, &[(vec![0.1, 0.2, 0.0, 0.0, 0.1], vec![0.5, -0.2, 0.3, 0.0, 0.0])], &spec)
        .unwrap();
    assert!(folded.pass, "{folded:?}");
}

#[test]
fn navier_reproduces_harmonic_polynomials() {
    let spec = QuadratureSpec::default();
    let polys: Vec<(fn(&[f64]) -> f64, &str)> = vec![
        (|_| 1.0, "1"),
        (|y| y[0], "y1"),
        (|y| y[0] * y[1], "y1y2"),
        (|y| y[0] * y[0] - y[2] * y[2], "y1^2-y3^2"),
        (|y| y[0] * y[1] * y[2], "y1y2y3"),
        (|y| y[0].powi(3) - 3.0 * y[0] * y[1] * y[1], "y1^3-3y1y2^2"),
        (|y| 2.0 * y[2].powi(3) - 3.0 * y[2] * (y[0] * y[0] + y[1] * y[1]), "zonal cubic"),
    ];
    for x in [[0.0, 0.0, 0.0], [0.3, -0.4, 0.5], [0.1, 0.75, -0.2]] {
        for (p, name) in &polys {
            let f = ScalarField::new(3, *p);
            let v = navier_representation(1.3, &[f], &x, &spec).unwrap();
            assert!((v.value - p(&x)).abs() < 1e-6, "{name} at {x:?}: {v:?}");
        }
    }
    assert!(navier_representation(1.0, &[ScalarField::constant(3, 1.0)], &[1.0, 0.0, 0.0], &spec).is_err());
}

#[test]
fn navier_biharmonic_cubic() {
    // h = y1 |y|^2 in 5-D: -Δh = -14 y1
    let spec = QuadratureSpec::default().with_rel_tol(1e-8);
    let r = 1.0;
    let f0 = ScalarField::new(5, move |y: &[f64]| y[0] * r * r);
    let f1 = ScalarField::new(5, |y: &[f64]| -14.0 * y[0]);
    let x = [0.2, -0.1, 0.3, 0.1, 0.0];
    let v = navier_representation(r, &[f0, f1], &x, &spec).unwrap();
    let exact = x[0] * x.iter().map(|a| a * a).sum::<f64>();
    assert!((v.value - exact).abs() < 1e-6, "{v:?} vs {exact}");
}

#[test]
fn halflap_poisson_kernel_mass_and_reproduction() {
    let spec = QuadratureSpec::default();
    for n in [1usize, 3] {
        for q in [0.0, 0.25, 0.5, 0.75] {
            let x: Vec<f64> = (0..n).map(|i| if i == 0 { 2.0 * q } else { 0.0 }).collect();
            let m = halflap_poisson_mass(2.0, &x, &spec).unwrap();
            assert!((m.value - 1.0).abs() < 1e-6, "n={n} q={q}: {m:?}");
            let lin = ScalarField::new(n, |y: &[f64]| y[0]).with_decay(DecayHint::PolyGrowth(1));
            let v = poisson_extension_halflap(2.0, &lin, &x, &spec).unwrap();
            assert!((v.value - x[0]).abs() < 1e-5, "n={n} q={q}: {v:?}");
        }
    }
    let y = [0.0, 0.0, 3.0];
    assert!(halflap_poisson_kernel(2.0, &[0.5, 0.1, 0.0], &y) > 0.0);
    let quad = ScalarField::new(1, |y: &[f64]| y[0] * y[0]).with_decay(DecayHint::PolyGrowth(2));
    assert!(poisson_extension_halflap(1.0, &quad, &[0.0], &spec).is_err());
}

#[test]
fn halflap_poisson_scale_covariance() {
    // constant normalizer and a kernel homogeneous of degree -n
    let (x, y) = ([0.3, -0.2, 0.1], [1.5, 0.4, -1.6]);
    let s = 3.0;
    let a = halflap_poisson_kernel(2.0, &x, &y);
    let b = halflap_poisson_kernel(2.0 * s, &x.map(|v| v * s), &y.map(|v| v * s));
    assert!((a - b * s.powi(3)).abs() < 1e-13 * a);
}

#[test]
fn g2_torsion_in_one_dimension() {
    let spec = QuadratureSpec::default();
    let one = ScalarField::constant(1, 1.0);
    for x in [0.0, 0.5] {
        let h = g2_solve(1.0, &one, &[x], &spec).unwrap();
        assert!((h.value - (1.0 - x * x).sqrt()).abs() < 1e-3, "{h:?}");
    }
    // the calibrated constant agrees with 1/(2π)
    let c = g2_calibration(1).unwrap().constant;
    assert!((c * 2.0 * PI - 1.0).abs() < 1e-6);
    // covariance: h scales like r for constant data
    let h2 = g2_solve(2.0, &one, &[1.0], &spec).unwrap();
    assert!((h2.value - 2.0 * (0.75f64).sqrt()).abs() < 1e-6);
}

#[test]
fn g2_residual_in_three_dimensions() {
    let spec = QuadratureSpec::default();
    let one = ScalarField::constant(3, 1.0);
    let h = g2_radial_solution(1.0, &one, 12, &spec).unwrap();
    let op = FracLapOperator::new(3, FracOrder::new(0, 0.5).unwrap(), IntegerLapMode::AnalyticDerivatives).unwrap();
    let loose = spec.clone().with_rel_tol(1e-5);
    for q in [0.2, 0.45, 0.7] {
        let r = frac_lap(&op, &h, &Point::on_axis(3, 0, q), &loose).unwrap();
        assert!((r.value - 1.0).abs() < 5e-2, "{q}: {r:?}");
    }
    let c = g2_calibration(3).unwrap().constant;
    assert!((c * 4.0 * PI * PI - 1.0).abs() < 1e-6);
}

#[test]
fn g2_bound_and_maximum_principle() {
    let spec = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pairs: Vec<(Vec<f64>, Vec<f64>)> =
        (0..1000).map(|_| (random_inside(&mut rng, 3, 1.0), random_inside(&mut rng, 3, 1.0))).collect();
    let ratio = g2_bound_ratio(1.0, &pairs).unwrap();
    let cap = g2_calibration(3).unwrap().constant * G2Profile::new(3).limit();
    assert!(ratio <= cap * (1.0 + 1e-9), "{ratio} vs {cap}");
    let mp = maximum_principle_check(1, 1.0, 1000, &spec).unwrap();
    assert!(mp.pass && mp.violations == 0, "{mp:?}");
    let mp3 = maximum_principle_check(3, 1.0, 12, &spec).unwrap();
    assert!(mp3.pass, "{mp3:?}");
}

#[test]
fn kernel_handles_and_grid() {
    let spec = QuadratureSpec::default();
    let k = BallKernel::new(BallKernelKind::G2, 1, 1.0, &spec).unwrap();
    assert!((k.normalizer * 2.0 * PI - 1.0).abs() < 1e-6);
    let mut buf = Vec::new();
    let rows = k.write_axis_grid(&[-0.5, 0.0, 0.5], &[-0.25, 0.25], &mut buf).unwrap();
    assert_eq!(rows, 6);
    let p = BallKernel::new(BallKernelKind::Poisson, 3, 1.0, &spec).unwrap();
    assert!(p.eval(&[0.0; 3], &[0.5, 0.0, 0.0]).is_err());
    assert!(BallKernel::new(BallKernelKind::IteratedG { j: 1 }, 3, 1.0, &spec).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn g1_symmetry_property(a in prop::array::uniform3(-0.55f64..0.55), b in prop::array::uniform3(-0.55f64..0.55)) {
        prop_assume!(a.iter().zip(&b).map(|(u, v)| (u - v).powi(2)).sum::<f64>() > 1e-6);
        let g = g1_eval(1.0, &a, &b).unwrap();
        let h = g1_eval(1.0, &b, &a).unwrap();
        prop_assert!(g > 0.0);
        prop_assert!((g - h).abs() <= 1e-12 * g.max(1.0));
    }

    #[test]
    fn halflap_poisson_kernel_positive(x in prop::array::uniform3(-0.5f64..0.5), y in prop::array::uniform3(1.0f64..4.0)) {
        prop_assert!(halflap_poisson_kernel(0.9, &x, &y) > 0.0);
    }
}
