//! Experiment driver behind the `levyscale` binary.
//!
//! Configuration is layered: per-experiment defaults, then an optional
//! `key=value` file (`--config`), then `--set KEY=VALUE`, then the named
//! flags. Each run writes a CSV whose comment header echoes the full config.

mod config;
mod run;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{auto_eps, EpsChoice, Experiment, ExperimentConfig, Validated, KEYS};
pub use run::{run_experiment, Report};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "levyscale", version, about = "Scale-aware experiments for symmetric jump processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: CommonOpts,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Tabulate ℓ, L (quadrature and closed form) and φ_a on a log grid.
    ScaleTable,
    /// Compare ψ(ξ) with L(1/ξ) over a log grid of frequencies.
    SymbolCheck,
    /// Mean exit times and exit-time tails over a grid of radii.
    ExitTime,
    /// Probabilities of exiting B_r beyond distance s.
    FarExit,
    /// Probabilities of hitting the half annulus before leaving B_{φ_a(r)}.
    Hitting,
    /// Harmonic-function probe and fitted regularity exponent.
    Regularity,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::ScaleTable => Experiment::ScaleTable,
            Command::SymbolCheck => Experiment::SymbolCheck,
            Command::ExitTime => Experiment::ExitTime,
            Command::FarExit => Experiment::FarExit,
            Command::Hitting => Experiment::Hitting,
            Command::Regularity => Experiment::Regularity,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonOpts {
    /// Config file of `key=value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Family id: rv-log2, power, log, const, invlog, invlog2.
    #[arg(long, global = true)]
    pub ell: Option<String>,
    #[arg(long, global = true)]
    pub beta: Option<String>,
    #[arg(long, global = true)]
    pub dim: Option<String>,
    /// Small-jump cutoff, or `auto`.
    #[arg(long, global = true)]
    pub eps: Option<String>,
    /// Small-jump treatment: drop or gaussian.
    #[arg(long, global = true)]
    pub mode: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    #[arg(long, global = true)]
    pub paths: Option<String>,
    /// CSV destination; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Override any config key.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    /// Also write a gnuplot script next to the CSV (`<out>.gp`).
    #[arg(long, global = true)]
    pub emit_gnu: bool,
    /// Write the events of the first simulated path to this CSV file.
    #[arg(long, global = true)]
    pub event_log: Option<PathBuf>,
}

/// Builds the effective config for `exp` from the layered sources.
pub fn build_config(exp: Experiment, opts: &CommonOpts) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults_for(exp);
    if let Some(path) = &opts.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    for item in &opts.set {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::config("set", format!("expected KEY=VALUE, found `{item}`")))?;
        cfg.set(k.trim(), v)?;
    }
    let named = [
        ("ell", &opts.ell),
        ("beta", &opts.beta),
        ("dim", &opts.dim),
        ("eps", &opts.eps),
        ("mode", &opts.mode),
        ("seed", &opts.seed),
        ("paths", &opts.paths),
        ("out", &opts.out),
    ];
    for (k, v) in named {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    Ok(cfg)
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<()> {
    let exp = Experiment::from(cli.command);
    let cfg = build_config(exp, &cli.opts)?;
    if cli.opts.emit_gnu && cfg.out.is_none() {
        return Err(Error::config("out", "--emit-gnu needs an output path"));
    }
    cfg.validate(exp)?;
    let mut log_file = match &cli.opts.event_log {
        Some(p) => Some(BufWriter::new(File::create(p)?)),
        None => None,
    };
    let report = run_experiment(exp, &cfg, log_file.as_mut().map(|f| f as &mut dyn Write))?;
    if let Some(mut f) = log_file {
        f.flush()?;
    }
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &report.csv)?;
            if cli.opts.emit_gnu {
                let mut gp = path.clone().into_os_string();
                gp.push(".gp");
                std::fs::write(PathBuf::from(gp), report.gnuplot_script(&path.display().to_string()))?;
            }
        }
        None => io::stdout().lock().write_all(report.csv.as_bytes())?,
    }
    let mut err = io::stderr().lock();
    for line in &report.summary {
        writeln!(err, "{line}")?;
    }
    Ok(())
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
