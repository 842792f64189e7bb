//! Command-line front end. Every subcommand resolves a [`RunConfig`] from an
//! optional file plus flags, runs one analyzer, and writes CSV tables,
//! `report.json` and `manifest.json` into the output directory.
//!
//! Exit codes: 0 success, 1 invalid config or input, 2 certification
//! failure, 3 tolerance failure under `--check`.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::potentials::DensitySpec;
use crate::solutions::FixtureSpec;
pub use config::RunConfig;
use config::{parse_list, parse_points};
pub use output::{CommandOutput, RunManifest, Table};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "QCURV_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_CERTIFICATION: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qcurv", version, about = "Fractional Laplacians, log-potentials and ball kernels for the constant Q-curvature equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// TOML or JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default `out/<command>`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 when the acceptance tolerances are not met.
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Spherical,
    Synthetic,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityKind {
    Spherical,
    Gaussian,
    Bump,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Residual of (-Δ)^{n/2} u = (n-1)! e^{nu} at sample points.
    Residual {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        field: Option<FieldKind>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Comma separated coordinates.
        #[arg(long)]
        center: Option<String>,
        /// Points separated by `;`, coordinates by `,`.
        #[arg(long)]
        points: Option<String>,
    },
    /// Log-potential and its derivatives along a ray, with the log sandwich.
    Potential {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        density: Option<DensityKind>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        radii: Option<String>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Decomposition u = v + P, slope of v and the growth criteria.
    Asymptotics {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        field: Option<FieldKind>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Skip the derivative decay fits.
        #[arg(long)]
        no_derivatives: bool,
    },
    /// Homogeneity of (-Δ)^σ applied to log|x| or |x|^{-j}.
    Scaling {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        radii: Option<String>,
    },
    /// Validation suite for the ball kernels.
    Green {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Decay, Riesz composition and support estimates.
    Estimates {
        #[command(flatten)]
        common: Common,
        /// Comma separated subset of schwartz, moment, support, riesz.
        #[arg(long)]
        kinds: Option<String>,
    },
    /// Exponential integrability sweep over p.
    Bm {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        ps: Option<String>,
    },
    /// Geometric and normalization constants.
    Constants {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sigmas: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Residual { .. } => "residual",
            Command::Potential { .. } => "potential",
            Command::Asymptotics { .. } => "asymptotics",
            Command::Scaling { .. } => "scaling",
            Command::Green { .. } => "green",
            Command::Estimates { .. } => "estimates",
            Command::Bm { .. } => "bm",
            Command::Constants { .. } => "constants",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Residual { common, .. }
            | Command::Potential { common, .. }
            | Command::Asymptotics { common, .. }
            | Command::Scaling { common, .. }
            | Command::Green { common, .. }
            | Command::Estimates { common, .. }
            | Command::Bm { common, .. }
            | Command::Constants { common, .. } => common,
        }
    }
}

fn fixture(kind: FieldKind, n: usize, lambda: Option<f64>, center: Option<Vec<f64>>) -> FixtureSpec {
    match kind {
        FieldKind::Spherical => FixtureSpec::Spherical { lambda: lambda.unwrap_or(1.0), center },
        FieldKind::Synthetic => FixtureSpec::standard_synthetic(n),
    }
}

/// Loads the config file and folds the flags into it.
pub fn resolve(cmd: &Command) -> Result<RunConfig> {
    let common = cmd.common();
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if common.n.is_some() {
        cfg.n = common.n;
    }
    if let Some(s) = common.seed {
        cfg.quadrature.seed = s;
    }
    if let Some(t) = common.rel_tol {
        cfg.quadrature.rel_tol = t;
    }
    if common.out.is_some() {
        cfg.out_dir = common.out.clone();
    }
    let n = cfg.n.unwrap_or(1);
    match cmd {
        Command::Residual { field, lambda, center, points, .. } => {
            let sec = cfg.residual.get_or_insert_with(Default::default);
            let center = center.as_deref().map(parse_list).transpose()?;
            if field.is_some() || lambda.is_some() || center.is_some() {
                let old = match &sec.field {
                    Some(FixtureSpec::Spherical { lambda, center }) => (Some(*lambda), center.clone()),
                    _ => (None, None),
                };
                sec.field = Some(fixture(field.unwrap_or(FieldKind::Spherical), n, lambda.or(old.0), center.or(old.1)));
            }
            if let Some(p) = points {
                sec.points = Some(parse_points(p)?);
            }
        }
        Command::Potential { density, lambda, radii, epsilon, .. } => {
            let sec = cfg.potential.get_or_insert_with(Default::default);
            if let Some(d) = density {
                sec.density = Some(match d {
                    DensityKind::Spherical => DensitySpec::Spherical { lambda: lambda.unwrap_or(1.0), center: None },
                    DensityKind::Gaussian => DensitySpec::Gaussian { a: 1.0, amplitude: 1.0, center: None },
                    DensityKind::Bump => DensitySpec::Bump { center: None, radius: 1.0, mass: 1.0 },
                });
            } else if let Some(l) = lambda {
                sec.density = Some(DensitySpec::Spherical { lambda: *l, center: None });
            }
            if let Some(r) = radii {
                sec.radii = Some(parse_list(r)?);
            }
            if epsilon.is_some() {
                sec.epsilon = *epsilon;
            }
        }
        Command::Asymptotics { field, lambda, no_derivatives, .. } => {
            let sec = cfg.asymptotics.get_or_insert_with(Default::default);
            if field.is_some() || lambda.is_some() {
                sec.field = Some(fixture(field.unwrap_or(FieldKind::Spherical), n, *lambda, None));
            }
            if *no_derivatives {
                sec.derivative_decay = Some(false);
            }
        }
        Command::Scaling { j, sigma, radii, .. } => {
            let sec = cfg.scaling.get_or_insert_with(Default::default);
            if j.is_some() {
                sec.j = *j;
            }
            if sigma.is_some() {
                sec.sigma = *sigma;
            }
            if let Some(r) = radii {
                sec.radii = Some(parse_list(r)?);
            }
        }
        Command::Green { radius, samples, .. } => {
            let sec = cfg.green.get_or_insert_with(Default::default);
            if radius.is_some() {
                sec.radius = *radius;
            }
            if samples.is_some() {
                sec.samples = *samples;
            }
        }
        Command::Estimates { kinds, .. } => {
            let sec = cfg.estimates.get_or_insert_with(Default::default);
            if let Some(k) = kinds {
                sec.kinds = Some(k.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect());
            }
        }
        Command::Bm { ps, .. } => {
            let sec = cfg.bm.get_or_insert_with(Default::default);
            if let Some(p) = ps {
                sec.ps = Some(parse_list(p)?);
            }
        }
        Command::Constants { sigmas, .. } => {
            let sec = cfg.constants.get_or_insert_with(Default::default);
            if let Some(s) = sigmas {
                sec.sigmas = Some(parse_list(s)?);
            }
        }
    }
    cfg.quadrature.validate()?;
    Ok(cfg)
}

/// Config as hashed into the manifest: the output directory is excluded so
/// the same run written to two places has the same digest.
pub fn canonical_config(command: &str, cfg: &RunConfig) -> Result<serde_json::Value> {
    let mut c = cfg.clone();
    c.out_dir = None;
    let mut v = serde_json::to_value(&c).map_err(|e| Error::Config(e.to_string()))?;
    if let Some(obj) = v.as_object_mut() {
        obj.insert("command".into(), command.into());
    }
    Ok(v)
}

fn configure_threads() {
    if let Some(k) = std::env::var(THREADS_ENV).ok().and_then(|s| s.parse::<usize>().ok()) {
        // a second call in the same process fails harmlessly
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_certification_failure() {
        EXIT_CERTIFICATION
    } else {
        EXIT_CONFIG
    }
}

/// Runs one command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    configure_threads();
    let name = cli.command.name();
    let check = cli.command.common().check;
    let started = Instant::now();
    let result = resolve(&cli.command).and_then(|cfg| {
        let out = commands::execute(name, &cfg)?;
        let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(name));
        let canon = canonical_config(name, &cfg)?;
        let manifest =
            output::write_outputs(&dir, name, &canon, cfg.quadrature.seed, &out, started.elapsed().as_secs_f64())?;
        Ok((dir, manifest))
    });
    match result {
        Ok((dir, manifest)) => {
            println!(
                "{name}: {} ({} files in {})",
                if manifest.pass { "pass" } else { "fail" },
                manifest.outputs.len() + 1,
                dir.display()
            );
            if check && !manifest.pass {
                EXIT_CHECK
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("{name}: error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Command {
        Cli::try_parse_from(args).unwrap().command
    }

    #[test]
    fn flags_override_config_sections() {
        let cmd = parse(&["qcurv", "residual", "--field", "spherical", "--n", "3", "--lambda", "2", "--points", "0,0,0;1,0,0"]);
        let cfg = resolve(&cmd).unwrap();
        assert_eq!(cfg.n, Some(3));
        let sec = cfg.residual.unwrap();
        assert_eq!(sec.field, Some(FixtureSpec::Spherical { lambda: 2.0, center: None }));
        assert_eq!(sec.points.unwrap().len(), 2);
    }

    #[test]
    fn digest_ignores_output_directory() {
        let a = resolve(&parse(&["qcurv", "constants", "--out", "a"])).unwrap();
        let b = resolve(&parse(&["qcurv", "constants", "--out", "b"])).unwrap();
        assert_eq!(canonical_config("constants", &a).unwrap(), canonical_config("constants", &b).unwrap());
    }

    #[test]
    fn usage_errors_exit_with_config_status() {
        assert_eq!(run(["qcurv", "nonsense"]), EXIT_CONFIG);
        assert_eq!(run(["qcurv", "scaling", "--radii", "1,x"]), EXIT_CONFIG);
    }
}
