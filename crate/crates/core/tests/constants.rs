use qcurv::domain::geom_constants;
use qcurv::fraclap::{constant_integral, normalization_constant};
use statrs::function::gamma::gamma;

/// Closed form `4^σ Γ(n/2 + σ) / (π^(n/2) |Γ(-σ)|)`, used only as an oracle.
fn closed_form(n: usize, sigma: f64) -> f64 {
    let h = n as f64 / 2.0;
    4f64.powf(sigma) * gamma(h + sigma) / (std::f64::consts::PI.powf(h) * gamma(-sigma).abs())
}

#[test]
fn normalization_constant_matches_gamma_oracle() {
    for n in [1usize, 3, 5] {
        for sigma in [0.25, 0.5, 0.75] {
            let c: f64 = normalization_constant(n, sigma).unwrap();
            let oracle = closed_form(n, sigma);
            let r = constant_integral(n, sigma).unwrap();
            assert!(c > 0.0);
            assert!((c - oracle).abs() < 1e-8 * oracle, "n={n} σ={sigma}: {c} vs {oracle} (err {})", r.err);
        }
    }
}

#[test]
fn cached_constant_is_stable() {
    let a: f64 = normalization_constant(3, 0.5).unwrap();
    let b: f64 = normalization_constant(3, 0.5).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
    assert!((a - 1.0 / std::f64::consts::PI.powi(2)).abs() < 1e-10);
}

#[test]
fn geometric_constants() {
    let g1 = geom_constants::<f64>(1).unwrap();
    assert!((g1.sphere_area - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    assert!((g1.gamma_n - std::f64::consts::PI).abs() < 1e-15);
    let g3 = geom_constants::<f64>(3).unwrap();
    assert!((g3.gamma_n - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-13);
    assert!(geom_constants::<f64>(0).is_err());
}
