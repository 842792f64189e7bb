//! Boundary representation of polyharmonic functions on a ball with Navier
//! data `(-Δ)^i h = f_i` on the sphere.

use crate::domain::field::ScalarField;
use crate::domain::point::{norm, MAX_DIM};
use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::fraclap::Estimate;
use crate::greens::g1::{check_ball_dim, check_inside, laplace_poisson_kernel};
use crate::quad::adaptive::{integrate, AdaptiveOptions};
use crate::quad::sphere::AngularIntegrator;

fn unit_axis(z: &[f64]) -> Vec<f64> {
    let m = norm(z);
    let mut a = vec![0.0; z.len()];
    if m > 0.0 {
        for (ai, zi) in a.iter_mut().zip(z) {
            *ai = zi / m;
        }
    } else {
        a[0] = 1.0;
    }
    a
}

/// Harmonic extension `∫_{∂B_r} P(z, y) f(y) dσ(y)` of boundary data.
pub fn harmonic_extension(r: f64, f: &ScalarField, z: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    let n = z.len();
    let axis = unit_axis(z);
    let symmetric = f.radial_center().is_some_and(|c| norm(c) == 0.0);
    if symmetric {
        // radial data is constant on the sphere
        let mut y = vec![0.0; n];
        y[0] = r;
        return Ok(Estimate { value: f.eval(&y), err_est: 0.0 });
    }
    let ang = AngularIntegrator::new(
        &axis,
        false,
        spec.angular_order as usize,
        spec.rel_tol * 0.1,
        spec.abs_tol * 1e-3,
        spec.angular_budget(),
    );
    let mut y = [0.0; MAX_DIM];
    let res = ang.integrate(
        &mut |w: &[f64]| {
            for i in 0..n {
                y[i] = r * w[i];
            }
            laplace_poisson_kernel(r, z, &y[..n]) * f.eval(&y[..n])
        },
        0.0,
    );
    let jac = r.powi(n as i32 - 1);
    Ok(Estimate { value: jac * res.value, err_est: jac * res.err })
}

/// `∫_{B_r} G_1(x, z) H(z) dz` for `H` the harmonic extension of `f`.
/// Expanding `H` in homogeneous harmonics `H_m`, the solution of
/// `-Δw = H_m` vanishing on the sphere is `(r^2-|x|^2) H_m / (2n + 4m)`,
/// which sums to `(r^2-|x|^2)/4 ∫_0^1 t^{n/2-1} H(t x) dt`. With `t = u^2`
/// the integrand is smooth and only interior points are visited.
fn green_of_harmonic(r: f64, f: &ScalarField, x: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    let n = x.len();
    let opts = AdaptiveOptions::new(spec.abs_tol, spec.rel_tol, spec.radial_budget());
    let mut z = vec![0.0; n];
    let mut failure = None;
    let mut g = |u: f64| -> (f64, f64) {
        let t = u * u;
        for i in 0..n {
            z[i] = t * x[i];
        }
        match harmonic_extension(r, f, &z, spec) {
            Ok(e) => {
                let w = 2.0 * u.powi(n as i32 - 1);
                (w * e.value, w * e.err_est)
            }
            Err(err) => {
                failure.get_or_insert(err);
                (f64::NAN, 0.0)
            }
        }
    };
    let q = integrate(&mut g, &[0.0, 0.5, 1.0], opts);
    if let Some(err) = failure {
        return Err(err);
    }
    let c = 0.25 * (r * r - x.iter().map(|v| v * v).sum::<f64>());
    Ok(Estimate { value: c * q.value, err_est: c * q.err })
}

/// `h(x) = -Σ_i ∫_{∂B_r} f_i(y) ∂_ν (-Δ)^{(n-3)/2-i} G(x, y) dσ(y)` for
/// `n ∈ {3, 5}`. Term `i` is the `i`-fold Green operator applied to the
/// harmonic extension of `f_i`.
pub fn navier_representation(r: f64, boundary_data: &[ScalarField], x: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    let n = x.len();
    check_ball_dim(n)?;
    check_inside(r, x, "x")?;
    let terms = (n - 1) / 2;
    if boundary_data.len() != terms {
        return Err(Error::InvalidArgument(format!(
            "dimension {n} needs {terms} boundary traces, got {}",
            boundary_data.len()
        )));
    }
    if let Some(f) = boundary_data.iter().find(|f| f.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: f.dim() });
    }
    if terms > 2 {
        return Err(Error::InvalidDimension(n));
    }
    let mut total = harmonic_extension(r, &boundary_data[0], x, spec)?;
    if terms == 2 {
        let inner = green_of_harmonic(r, &boundary_data[1], x, spec)?;
        total.value += inner.value;
        total.err_est += inner.err_est;
    }
    Ok(total)
}
