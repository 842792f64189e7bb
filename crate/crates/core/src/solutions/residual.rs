//! Pointwise residual of `(-Δ)^{n/2} u = (n-1)! e^{nu}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::field::ScalarField;
use crate::domain::geom::factorial;
use crate::domain::order::FracOrder;
use crate::domain::point::Point;
use crate::domain::spec::QuadratureSpec;
use crate::error::Result;
use crate::fraclap::{frac_lap, FracLapOperator, IntegerLapMode};

#[derive(Clone, Debug, Serialize)]
pub struct ResidualRow {
    pub point: Vec<f64>,
    pub lhs: f64,
    pub lhs_err: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Evaluates both sides at each point. The left side is the composite
/// operator `(-Δ)^{1/2} (-Δ)^{(n-1)/2}`, using the field's registered `-Δ`
/// closures; `n` must be odd.
pub fn pde_residual(u: &ScalarField, points: &[Point], spec: &QuadratureSpec) -> Result<Vec<ResidualRow>> {
    spec.validate()?;
    let n = u.dim();
    let op = FracLapOperator::new(n, FracOrder::half_dimension(n)?, IntegerLapMode::AnalyticDerivatives)?;
    let fact = factorial::<f64>(n as u32 - 1);
    points
        .par_iter()
        .map(|p| {
            p.check_dim(n)?;
            let lhs = frac_lap(&op, u, p, spec)?;
            let rhs = fact * (n as f64 * u.eval(p.coords())).exp();
            Ok(ResidualRow {
                point: p.coords().to_vec(),
                lhs: lhs.value,
                lhs_err: lhs.err_est,
                rhs,
                residual: (lhs.value - rhs).abs(),
            })
        })
        .collect()
}
