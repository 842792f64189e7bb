use std::f64::consts::PI;

use qcurv::domain::{MultiIndex, Point, QuadratureSpec};
use qcurv::solutions::*;

const CATALAN: f64 = 0.915_965_594_177_219_015;

fn on_axis(n: usize, ts: &[f64]) -> Vec<Point> {
    ts.iter().map(|&t| Point::on_axis(n, 0, t)).collect()
}

#[test]
fn residual_in_one_dimension() {
    let spec = QuadratureSpec::default();
    let u = SphericalSolution::<f64>::standard(1).field();
    let rows = pde_residual(&u, &on_axis(1, &[0.0, 0.5, -0.5, 2.0, -2.0, 10.0, -10.0]), &spec).unwrap();
    for r in &rows {
        assert!(r.residual.abs() <= 1e-4, "{r:?}");
    }
    assert!((rows[0].rhs - 2.0).abs() < 1e-15);
}

#[test]
fn residual_in_three_dimensions() {
    let spec = QuadratureSpec::default();
    let u = SphericalSolution::<f64>::standard(3).field();
    let rows = pde_residual(&u, &on_axis(3, &[0.0, 1.0, 3.0]), &spec).unwrap();
    for (r, rhs) in rows.iter().zip([16.0, 2.0, 0.016]) {
        assert!((r.rhs - rhs).abs() < 1e-12);
        assert!(r.residual.abs() <= 1e-3 * r.rhs.max(1.0), "{r:?}");
    }
}

#[test]
fn residual_is_dilation_covariant() {
    // u_{λ,x0}(x0 + z/λ) = u_{1,0}(z) + log λ, so both sides scale by λ^n
    let spec = QuadratureSpec::default();
    let base = SphericalSolution::<f64>::standard(1).field();
    let moved = SphericalSolution::new(2.0, Point::from_f64(&[0.5]).unwrap()).unwrap().field();
    for z in [0.0, 1.0] {
        let a = pde_residual(&base, &[Point::on_axis(1, 0, z)], &spec).unwrap();
        let b = pde_residual(&moved, &[Point::on_axis(1, 0, 0.5 + z / 2.0)], &spec).unwrap();
        assert!((b[0].lhs / 2.0 - a[0].lhs).abs() < 1e-6 * a[0].lhs.abs(), "{a:?} {b:?}");
        assert!((b[0].rhs / 2.0 - a[0].rhs).abs() < 1e-12);
    }
    let s = SphericalSolution::new(2.0, Point::from_f64(&[1.0, 1.0, 1.0]).unwrap()).unwrap();
    let r = pde_residual(&s.field(), &[Point::from_f64(&[1.0, 1.0, 1.0]).unwrap()], &spec).unwrap();
    assert!((r[0].lhs - 128.0).abs() < 1e-3 * 128.0, "{r:?}");
}

#[test]
fn residual_needs_odd_dimension() {
    let u = qcurv::domain::ScalarField::<f64>::constant(2, 0.0);
    assert!(pde_residual(&u, &[Point::origin(2)], &QuadratureSpec::default()).is_err());
}

#[test]
fn volume_and_alpha_do_not_depend_on_lambda() {
    let spec = QuadratureSpec::default();
    for (n, volume) in [(1usize, 2.0 * PI), (3, 2.0 * PI * PI)] {
        for lambda in [0.5, 1.0, 2.0] {
            let s = SphericalSolution::new(lambda, Point::origin(n)).unwrap();
            let va = volume_and_alpha(&SolutionField::spherical(&s), &spec).unwrap();
            assert!((va.volume / volume - 1.0).abs() < 1e-4, "n={n} λ={lambda}: {va:?}");
            assert!((va.alpha - 2.0).abs() < 2e-4, "{va:?}");
        }
    }
    let none = SolutionField::from_spec(3, &FixtureSpec::Vanishing, &spec).unwrap();
    let va = volume_and_alpha(&none, &spec).unwrap();
    assert_eq!((va.volume, va.alpha), (0.0, 0.0));
}

#[test]
fn one_dimensional_decomposition() {
    let spec = QuadratureSpec::default();
    let f = SolutionField::spherical(&SphericalSolution::standard(1));
    let rep = asymptotic_decomposition(&f, &spec, &AsymptoticOptions::default()).unwrap();
    assert!((1.9..=2.1).contains(&rep.fit.alpha_hat), "{:?}", rep.fit);
    assert!((rep.fit.alpha_predicted - 2.0).abs() < 1e-6);
    // P = u(0) - v(0) = -4G/π
    assert_eq!(rep.polynomial.degree(), 0);
    let p0 = rep.polynomial.coeff(&MultiIndex::zero(1));
    assert!((p0 + 4.0 * CATALAN / PI).abs() < 1e-6, "{p0}");
    assert!(rep.derivative_decay.is_empty());
}

#[test]
fn three_dimensional_decomposition_and_criteria() {
    let spec = QuadratureSpec::default();
    let f = SolutionField::spherical(&SphericalSolution::standard(3));
    let opts = AsymptoticOptions {
        derivative_orders: Some(vec![MultiIndex::unit(3, 0), MultiIndex(vec![1, 1, 0])]),
        ..Default::default()
    };
    let rep = asymptotic_decomposition(&f, &spec, &opts).unwrap();
    assert!((rep.fit.alpha_hat - 2.0).abs() <= 0.1, "{:?}", rep.fit);
    assert_eq!(rep.polynomial.degree_above(DEGREE_THRESHOLD), 0);
    for (k, d) in &rep.derivative_decay {
        assert!(d.pass, "{k}: {d:?}");
    }
    assert_eq!(rep.derivative_decay["1,1,0"].predicted_exponent, 2.0);
    let crit = growth_criteria(&f, &spec, &opts).unwrap();
    assert_eq!(crit.deg_p, 0);
    assert!(crit.laplacian_limits.iter().all(|l| l.limit.abs() <= 1e-3), "{:?}", crit.laplacian_limits);
    assert!(crit.sup_quadratic_ratio < 1e-3);
    // u tends to -∞
    let trend: Vec<f64> = crit.u_trend.iter().map(|t| t.1).collect();
    assert!(trend.windows(2).all(|w| w[1] < w[0]));
    assert!(crit.u_trend.iter().filter(|t| t.0 >= 1e3).all(|t| t.1 < -10.0));
}

#[test]
fn synthetic_field_recovers_its_polynomial() {
    let spec = QuadratureSpec::default();
    let f = SolutionField::from_spec(3, &FixtureSpec::standard_synthetic(3), &spec).unwrap();
    assert!(!f.is_solution);
    let known = f.known_polynomial.clone().unwrap();
    let crit = growth_criteria(&f, &spec, &AsymptoticOptions::default()).unwrap();
    assert_eq!(crit.deg_p, 2);
    assert!(crit.polynomial.max_coeff_diff(&known) <= 1e-4);
    // Δ(5 - |x|^2) = -6
    let lim = &crit.laplacian_limits[0];
    assert_eq!(lim.j, 1);
    assert!((lim.limit + 6.0).abs() <= 1e-2, "{lim:?}");
    assert!(crit.sup_quadratic_ratio > 0.5);
}

#[test]
fn polynomial_fixture_has_no_potential() {
    let spec = QuadratureSpec::default();
    let fixture = FixtureSpec::Polynomial { polynomial: vec![PolyTerm { alpha: vec![0, 0, 0], coeff: -2.0 }] };
    let f = SolutionField::from_spec(3, &fixture, &spec).unwrap();
    let rep = asymptotic_decomposition(&f, &spec, &AsymptoticOptions::default()).unwrap();
    assert_eq!(rep.fit.alpha_hat, 0.0);
    assert!(rep.derivative_decay.is_empty());
    let crit = growth_criteria(&f, &spec, &AsymptoticOptions::default()).unwrap();
    assert_eq!(crit.deg_p, 0);
    assert!(crit.laplacian_limits.iter().all(|l| l.limit == 0.0));
}
