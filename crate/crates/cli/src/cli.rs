//! Command-line front end.
//!
//! Exit codes: 0 success, 1 output I/O failure, 2 configuration error,
//! 3 solver failure, 64 usage error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use phyllo_core::bifurcation::{sweep, Axis, Range, SweepParam, SweepSpec};
use phyllo_core::kinetic::{
    analytic_l2_error, check_k_solution, estimate_diffusivity, predicted_diffusivity, run_kinetic,
};
use phyllo_core::model::{equilibrium, jacobian, CoefficientCase};
use phyllo_core::stability::{
    critical_k2, default_dispersion, delta_threshold, homogeneous_stability, linearized_diffusion,
    turing_conditions,
};
use phyllo_core::timestepper::run;

use crate::config::{ConfigError, RunConfig};
use crate::output;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "phyllo",
    version,
    about = "Two-strain reaction-cross-diffusion model: stability, sweeps, simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON run configuration. Without it the self-diffusion reference case
    /// at zeta=3, delta=2.7 is used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override applied after loading, e.g. `--set model.delta=2.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Homogeneous equilibrium, Jacobian and its stability class.
    Equilibrium {
        #[command(flatten)]
        common: Common,
    },
    /// Dispersion curve as CSV.
    Dispersion {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turing conditions, critical wavenumber and the threshold on delta.
    Stability {
        #[command(flatten)]
        common: Common,
    },
    /// Region map over two parameters as CSV.
    Bifurcate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "zeta")]
        param1: SweepParam,
        #[arg(long, default_value = "1.5:5:50")]
        range1: Range,
        #[arg(long, default_value = "delta")]
        param2: SweepParam,
        #[arg(long, default_value = "0.5:5:50")]
        range2: Range,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-element run; writes diagnostics.csv and snapshot files.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out_dir: PathBuf,
        /// Shorthand for `--set solver.t_final=<T>`.
        #[arg(long)]
        t_final: Option<f64>,
    },
    /// Kinetic relaxation run and diffusivity estimate.
    KineticCheck {
        #[command(flatten)]
        common: Common,
        /// Density history CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prints the normalized configuration.
    Config {
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Config(ConfigError),
    Solver(String),
    Io(io::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn solver(e: phyllo_core::Error) -> Failure {
    Failure::Solver(e.to_string())
}

type CmdResult = Result<(), Failure>;

fn load(common: &Common, extra: &[String]) -> Result<RunConfig, ConfigError> {
    let mut overrides = common.set.clone();
    overrides.extend_from_slice(extra);
    match &common.config {
        Some(path) => RunConfig::load(path, &overrides),
        None => RunConfig::from_json(
            &RunConfig::reference(3.0, 2.7, CoefficientCase::SelfDiffusion).to_json(),
            &overrides,
        ),
    }
}

fn open_out(
    path: &Option<PathBuf>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()
        }
        None => f(stdout),
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()
}

fn cmd_equilibrium(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let p = cfg.params();
    let eq = equilibrium(&p).map_err(solver)?;
    writeln!(out, "n1={}", eq.n1)?;
    writeln!(out, "n2={}", eq.n2)?;
    writeln!(out, "positive={}", eq.positive)?;
    match jacobian(&p) {
        Ok(j) => {
            writeln!(
                out,
                "j11={}\nj12={}\nj21={}\nj22={}",
                j.j[0][0], j.j[0][1], j.j[1][0], j.j[1][1]
            )?;
            writeln!(out, "trace={}", j.trace)?;
            writeln!(out, "det={}", j.det)?;
        }
        Err(e) => writeln!(out, "jacobian=none ({e})")?,
    }
    writeln!(out, "stability={:?}", homogeneous_stability(&p))?;
    Ok(())
}

fn cmd_dispersion(cfg: &RunConfig, path: &Option<PathBuf>, out: &mut dyn Write) -> CmdResult {
    let p = cfg.params();
    let d = linearized_diffusion(&p).map_err(solver)?;
    let curve = default_dispersion(&p, &d).map_err(solver)?;
    open_out(path, out, |w| output::write_dispersion(w, &curve))?;
    Ok(())
}

fn cmd_stability(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let p = cfg.params();
    let d = linearized_diffusion(&p).map_err(solver)?;
    let t = turing_conditions(&p, &d);
    writeln!(out, "delta={}", d.delta())?;
    writeln!(out, "delta12={}", d.delta12() + 0.0)?;
    writeln!(out, "delta21={}", d.delta21() + 0.0)?;
    writeln!(out, "s1={}", t.s1)?;
    writeln!(out, "s2={}", t.s2)?;
    writeln!(out, "turing={}", t.turing)?;
    match critical_k2(&p, &d) {
        Ok(k) => writeln!(out, "k_c2={k}")?,
        Err(_) => writeln!(out, "k_c2=none")?,
    }
    match delta_threshold(&p, d.delta12(), d.delta21()) {
        Ok(th) => {
            writeln!(out, "delta_bar={:.5}", th.value)?;
            writeln!(out, "delta_bar_exact={}", th.value)?;
            if let Some(pf) = th.printed_form {
                writeln!(
                    out,
                    "delta_bar_printed_form={pf:.5} (flagged: beta^2 numerator, not a root of s2; not used)"
                )?;
            }
        }
        Err(e) => writeln!(out, "delta_bar=none ({e})")?,
    }
    Ok(())
}

fn cmd_bifurcate(
    cfg: &RunConfig,
    axes: (SweepParam, Range, SweepParam, Range),
    path: &Option<PathBuf>,
    out: &mut dyn Write,
) -> CmdResult {
    let spec = SweepSpec {
        base: cfg.params(),
        axis1: Axis {
            param: axes.0,
            range: axes.1,
        },
        axis2: Axis {
            param: axes.2,
            range: axes.3,
        },
    };
    spec.validate()
        .map_err(|e| Failure::Config(ConfigError::Invalid(e.to_string())))?;
    let map = sweep(&spec).map_err(solver)?;
    open_out(path, out, |w| output::write_region_map(w, &map))?;
    Ok(())
}

fn cmd_simulate(cfg: &RunConfig, dir: &Path, out: &mut dyn Write) -> CmdResult {
    let mesh = cfg
        .mesh()
        .map_err(|e| Failure::Config(ConfigError::Invalid(format!("mesh: {e}"))))?;
    let p = cfg.params();
    fs::create_dir_all(dir)?;
    let diag_path = dir.join("diagnostics.csv");
    match run(&mesh, &p, &cfg.solver.solver_config()) {
        Ok(res) => {
            write_file(&diag_path, |w| {
                output::write_diagnostics(w, &res.diagnostics)
            })?;
            for (i, snap) in res.snapshots.iter().enumerate() {
                write_file(&dir.join(format!("snapshot_{i:05}.csv")), |w| {
                    output::write_snapshot(w, &mesh, snap)
                })?;
            }
            let last = res.diagnostics.last().expect("initial record");
            writeln!(out, "steps={}", res.diagnostics.len() - 1)?;
            writeln!(out, "snapshots={}", res.snapshots.len())?;
            writeln!(out, "t={}", last.t)?;
            writeln!(out, "range1={}", last.max1 - last.min1)?;
            writeln!(out, "dominant_mode={},{}", last.mode_m, last.mode_n)?;
            Ok(())
        }
        Err(fail) => {
            write_file(&diag_path, |w| {
                output::write_diagnostics(w, &fail.diagnostics)
            })?;
            write_file(&dir.join("last_good.csv"), |w| {
                output::write_snapshot(w, &mesh, &fail.last_good)
            })?;
            Err(Failure::Solver(fail.error.to_string()))
        }
    }
}

fn cmd_kinetic(cfg: &RunConfig, path: &Option<PathBuf>, out: &mut dyn Write) -> CmdResult {
    let k = &cfg.kinetic;
    let grid = k.grid().map_err(solver)?;
    let s0 = k.initial_state(&grid).map_err(solver)?;
    let (history, last) = run_kinetic(&grid, &s0, &k.run_config()).map_err(solver)?;
    let est = estimate_diffusivity(&history, &grid).map_err(solver)?;
    let d_pred = predicted_diffusivity(k.eta, k.c);
    let m0 = s0.mass(&grid);
    if let Some(p) = path {
        write_file(p, |w| output::write_density_history(w, &history))?;
    }
    let kc = check_k_solution(&grid, k.eta).map_err(solver)?;
    writeln!(out, "steps={} dt={}", history.steps, history.dt)?;
    writeln!(
        out,
        "l2_error={}",
        analytic_l2_error(
            history.rho.last().expect("initial record"),
            &grid,
            d_pred,
            last.t
        )
    )?;
    writeln!(out, "mass_drift={}", ((last.mass(&grid) - m0) / m0).abs())?;
    writeln!(
        out,
        "k_residual={} d_tilde={} chi_tilde={}",
        kc.residual, kc.d_tensor[0][0], kc.chi
    )?;
    writeln!(
        out,
        "D_est={} D_pred={} rel_err={} (D_pred = c^2/(6 eta), 1/(6 eta) = {})",
        est.d_est,
        d_pred,
        (est.d_est - d_pred) / d_pred,
        1.0 / (6.0 * k.eta)
    )?;
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CmdResult {
    match cli.command {
        Command::Equilibrium { common } => cmd_equilibrium(&load(&common, &[])?, out),
        Command::Dispersion { common, out: path } => {
            cmd_dispersion(&load(&common, &[])?, &path, out)
        }
        Command::Stability { common } => cmd_stability(&load(&common, &[])?, out),
        Command::Bifurcate {
            common,
            param1,
            range1,
            param2,
            range2,
            out: path,
        } => cmd_bifurcate(
            &load(&common, &[])?,
            (param1, range1, param2, range2),
            &path,
            out,
        ),
        Command::Simulate {
            common,
            out_dir,
            t_final,
        } => {
            let extra: Vec<String> = t_final
                .map(|t| format!("solver.t_final={t}"))
                .into_iter()
                .collect();
            cmd_simulate(&load(&common, &extra)?, &out_dir, out)
        }
        Command::KineticCheck { common, out: path } => {
            cmd_kinetic(&load(&common, &[])?, &path, out)
        }
        Command::Config { common } => {
            writeln!(out, "{}", load(&common, &[])?.to_json())?;
            Ok(())
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = dispatch(cli, out).and_then(|()| out.flush().map_err(Failure::Io));
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
        Err(Failure::Solver(e)) => {
            let _ = writeln!(err, "solver failure: {e}");
            EXIT_SOLVER
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "i/o error: {e}");
            EXIT_IO
        }
    }
}
