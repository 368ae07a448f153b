mod config;
mod output;
mod presets;
mod run;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{Format, MethodSpec, RunSpec};

#[derive(Parser)]
#[command(name = "irs-outage", version, about = "Outage probability of IRS-assisted links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every grid point of a config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Run a bundled preset (`list` prints the names).
    Table {
        preset: String,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Emit (x, OP) curves along the config's sweep axis.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        opts: Overrides,
    },
    /// Parse and check a config without running it.
    Validate { config: PathBuf },
}

#[derive(Args)]
struct Overrides {
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Base seed; grid point i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated method list, e.g. `univariate,gamma-kl,simulated`.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<MethodSpec>>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
}

impl Overrides {
    fn apply(self, spec: &mut RunSpec) -> Result<()> {
        if let Some(s) = self.samples {
            spec.monte_carlo.samples = s;
        }
        if let Some(s) = self.seed {
            spec.monte_carlo.seed = s;
        }
        if let Some(m) = self.methods {
            spec.methods = m;
        }
        if let Some(p) = self.out {
            spec.output.path = Some(p);
        }
        if let Some(f) = self.format {
            spec.output.format = f;
        }
        spec.validate()
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs the spec and writes the result; returns the number of failed rows.
fn execute(spec: &RunSpec, sweep: bool) -> Result<usize> {
    let rows = run::run(spec)?;
    let mut out = sink(spec.output.path.as_deref())?;
    match (spec.output.format, sweep) {
        (Format::Json, _) => output::write_json(&mut out, spec, &rows)?,
        (Format::Csv, false) => output::write_csv(&mut out, spec, &rows)?,
        (Format::Csv, true) => output::write_sweep_csv(&mut out, spec, &rows)?,
    }
    out.flush()?;
    let failed: Vec<_> = rows.iter().filter(|r| r.failed()).collect();
    for r in failed.iter().take(10) {
        eprintln!(
            "error: grid point {} ({} at {} dB): {}",
            r.grid_index,
            r.method,
            r.threshold_db,
            r.error.as_deref().unwrap_or_default()
        );
    }
    Ok(failed.len())
}

fn main_inner() -> Result<usize> {
    match Cli::parse().command {
        Command::Run { config, opts } => {
            let mut spec = RunSpec::load(&config)?;
            opts.apply(&mut spec)?;
            execute(&spec, false)
        }
        Command::Table { preset, opts } => {
            if preset == "list" {
                for (name, _) in presets::PRESETS {
                    println!("{name}");
                }
                return Ok(0);
            }
            let text = presets::find(&preset).ok_or_else(|| {
                let names: Vec<_> = presets::PRESETS.iter().map(|(n, _)| *n).collect();
                anyhow!("unknown preset `{preset}`; available: {}", names.join(", "))
            })?;
            let mut spec = RunSpec::parse(text)?;
            opts.apply(&mut spec)?;
            execute(&spec, spec.sweep.is_some())
        }
        Command::Sweep { config, opts } => {
            let mut spec = RunSpec::load(&config)?;
            if spec.sweep.is_none() {
                return Err(anyhow!("{}: missing [sweep] section", config.display()));
            }
            opts.apply(&mut spec)?;
            execute(&spec, true)
        }
        Command::Validate { config } => {
            let spec = RunSpec::load(&config)?;
            let grid = spec.grid()?;
            println!(
                "ok: {} grid points x {} methods x {} thresholds",
                grid.len(),
                spec.methods.len(),
                spec.thresholds_db.len()
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("{n} result(s) failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
