#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use nonrecip::analysis::FrequencyGrid;
use nonrecip::Execution;
use nonrecip_cli::commands::{self, Output};
use nonrecip_cli::config::{load_config, OutputKind, RunConfig, Tolerances};

#[derive(Parser)]
#[command(
    name = "nonrecip",
    version,
    about = "Scattering sweeps and condition checks for nonreciprocal coupled-mode devices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transmission and reflection spectra as CSV
    Sweep(Common),
    /// Check a device against its optimality conditions (exit 1 if unmet)
    Check(Common),
    /// Closed-form vs generic scattering matrices as CSV (exit 1 above tolerance)
    Compare(Common),
    /// Print the network description as JSON
    Device(Common),
    /// Classify the spectrum's symmetry under omega -> -omega
    Symmetry(Common),
    /// Isolator transmission over a two-parameter map
    Scan(Common),
    /// Write every output listed in the config into the --out directory
    Run(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output file (a directory for `run`); stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Frequency grid override as start,stop,points
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Option<FrequencyGrid>,
    /// Tolerance override for conditions, comparisons and symmetry
    #[arg(long)]
    tol: Option<f64>,
    /// Evaluate on the calling thread only
    #[arg(long)]
    sequential: bool,
}

fn parse_grid(s: &str) -> Result<FrequencyGrid, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("expected start,stop,points, got `{s}`"));
    };
    let start = a.parse::<f64>().map_err(|e| format!("start: {e}"))?;
    let stop = b.parse::<f64>().map_err(|e| format!("stop: {e}"))?;
    let points = n.parse::<usize>().map_err(|e| format!("points: {e}"))?;
    FrequencyGrid::new(start, stop, points).map_err(|e| e.to_string())
}

impl Common {
    fn load(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = load_config(&self.config)
            .with_context(|| format!("loading {}", self.config.display()))?;
        if let Some(grid) = self.grid {
            cfg.grid = grid;
        }
        if let Some(tol) = self.tol {
            if !(tol >= 0.0) {
                bail!("--tol must be nonnegative, got {tol}");
            }
            cfg.tolerances = Tolerances::uniform(tol);
        }
        Ok(cfg)
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn destination(&self, cfg: &RunConfig) -> Option<PathBuf> {
        self.out.clone().or_else(|| cfg.output.clone())
    }
}

fn emit(out: &Output, dest: Option<&Path>) -> anyhow::Result<()> {
    match dest {
        Some(path) => std::fs::write(path, &out.text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => match std::io::stdout().lock().write_all(out.text.as_bytes()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return Ok(()),
            r => r?,
        },
    }
    if let Some(s) = &out.summary {
        eprintln!("{s}");
    }
    Ok(())
}

fn single(common: &Common, kind: OutputKind) -> anyhow::Result<bool> {
    let cfg = common.load()?;
    let out = commands::produce(kind, &cfg, common.exec())?;
    emit(&out, common.destination(&cfg).as_deref())?;
    Ok(out.ok)
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Sweep(c) => single(&c, OutputKind::Spectrum),
        Command::Check(c) => single(&c, OutputKind::Conditions),
        Command::Compare(c) => single(&c, OutputKind::Compare),
        Command::Device(c) => single(&c, OutputKind::Device),
        Command::Symmetry(c) => single(&c, OutputKind::Symmetry),
        Command::Scan(c) => single(&c, OutputKind::Scan),
        Command::Run(c) => {
            let cfg = c.load()?;
            let Some(dir) = c.destination(&cfg) else {
                bail!("`run` needs an output directory (--out or `output` in the config)");
            };
            let mut ok = true;
            for (kind, out) in commands::run(&cfg, &dir, c.exec())? {
                if let Some(s) = &out.summary {
                    eprintln!("{}: {s}", kind.file_name());
                }
                ok &= out.ok;
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
