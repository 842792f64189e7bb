//! A uniform handle on the ball kernels, with CSV export of kernel grids.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::domain::spec::QuadratureSpec;
use crate::error::{Error, Result};
use crate::greens::g1::{check_ball_dim, fold_count, g1_constant, g1_eval, iterated_green};
use crate::greens::g2::{g2_calibration, g2_kernel};
use crate::greens::poisson::{halflap_poisson_constant, halflap_poisson_kernel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BallKernelKind {
    G1,
    IteratedG { j: u32 },
    Poisson,
    G2,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallKernel {
    pub kind: BallKernelKind,
    pub radius: f64,
    pub dim: usize,
    /// Leading constant: `1/(n(n-2)|B_1|)` for `G_1` and its iterates, the
    /// calibrated `C_n` for the half-Laplacian kernels.
    pub normalizer: f64,
    #[serde(skip)]
    spec: QuadratureSpec,
}

impl BallKernel {
    /// Builds the kernel; calibrated constants are computed here so that
    /// evaluation is pure.
    pub fn new(kind: BallKernelKind, dim: usize, radius: f64, spec: &QuadratureSpec) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!("ball radius {radius} must be positive")));
        }
        let normalizer = match kind {
            BallKernelKind::G1 => {
                check_ball_dim(dim)?;
                g1_constant(dim)
            }
            BallKernelKind::IteratedG { j } => {
                fold_count(dim, j)?;
                g1_constant(dim)
            }
            BallKernelKind::Poisson => halflap_poisson_constant(dim),
            BallKernelKind::G2 => g2_calibration(dim)?.constant,
        };
        Ok(Self { kind, radius, dim, normalizer, spec: spec.clone() })
    }

    /// Kernel value. For `Poisson`, `x` is interior and `y` exterior.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        for p in [x, y] {
            if p.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: p.len() });
            }
        }
        let r = self.radius;
        match self.kind {
            BallKernelKind::G1 => g1_eval(r, x, y),
            BallKernelKind::IteratedG { j } => iterated_green(r, j, x, y, &self.spec).map(|m| m.value),
            BallKernelKind::Poisson => {
                let (nx, ny) = (crate::domain::point::norm(x), crate::domain::point::norm(y));
                if !(nx < r && ny > r) {
                    return Err(Error::OutsideDomain(format!("Poisson kernel needs |x| < {r} < |y|")));
                }
                Ok(halflap_poisson_kernel(r, x, y))
            }
            BallKernelKind::G2 => g2_kernel(r, x, y),
        }
    }

    /// Writes `x, y, value` rows for points `t e_1` on the first axis;
    /// pairs outside the kernel's domain are skipped.
    pub fn write_axis_grid<W: Write>(&self, xs: &[f64], ys: &[f64], out: W) -> Result<usize> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["x", "y", "value"]).map_err(io)?;
        let mut rows = 0;
        let mut px = vec![0.0; self.dim];
        let mut py = vec![0.0; self.dim];
        for &a in xs {
            for &b in ys {
                px[0] = a;
                py[0] = b;
                match self.eval(&px, &py) {
                    Ok(v) => {
                        w.write_record([format!("{a:.16e}"), format!("{b:.16e}"), format!("{v:.16e}")]).map_err(io)?;
                        rows += 1;
                    }
                    Err(Error::CoincidentPoints | Error::OutsideDomain(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))?;
        Ok(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_grid_skips_diagonal() {
        let k = BallKernel::new(BallKernelKind::G1, 3, 1.0, &QuadratureSpec::default()).unwrap();
        let mut buf = Vec::new();
        let rows = k.write_axis_grid(&[-0.5, 0.0, 0.5], &[-0.5, 0.0, 0.5, 1.5], &mut buf).unwrap();
        assert_eq!(rows, 6);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,y,value\n"));
        assert_eq!(text.lines().count(), 7);
    }
}
