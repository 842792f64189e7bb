//! Total volume `V = ∫ e^{nu}` and the growth rate `α = 2V/|S^n|`.

use serde::Serialize;

use crate::domain::geom::sphere_area;
use crate::domain::spec::QuadratureSpec;
use crate::error::Result;
use crate::quad::volume::{truncated_integral, Domain};
use crate::solutions::fixtures::SolutionField;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct VolumeAlpha {
    pub volume: f64,
    pub volume_err: f64,
    pub alpha: f64,
}

/// `V` by full-space quadrature with a certified tail; fails when the decay
/// of `e^{nu}` is not declared.
pub fn volume_and_alpha(field: &SolutionField, spec: &QuadratureSpec) -> Result<VolumeAlpha> {
    let n = field.dim;
    let q = truncated_integral(&field.exp_nu, &Domain::FullSpace, spec)?;
    let area = sphere_area::<f64>(n as u32);
    Ok(VolumeAlpha { volume: q.value, volume_err: q.err_est, alpha: 2.0 * q.value / area })
}
