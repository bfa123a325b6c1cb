//! `qbwalk`: run disordered quantum-walk experiments from the command line.
//!
//! Exit status is 0 on success, 1 for configuration or usage errors and 2
//! for failures while running. `QBWALK_WORKERS` sets the number of worker
//! threads; it changes speed only, never results.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use boomerang_walk::{
    fit_csv, parse_config, run_experiment, Error, ExperimentSpec, Preset, Result, RunManifest,
    SweepParameter,
};

const WORKERS_VAR: &str = "QBWALK_WORKERS";

#[derive(Parser)]
#[command(
    name = "qbwalk",
    version,
    about = "Disordered quantum walks and the quantum boomerang effect"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a key=value configuration file.
    Run { config: PathBuf },
    /// Run a named preset (fig1, fig2, fig3, fig4a, fig4b).
    Preset {
        name: String,
        /// Master seed for all disorder draws.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: output/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a power law to a column of a sweep table.
    Fit {
        csv: PathBuf,
        #[arg(long, default_value = "x_max")]
        column: String,
        #[arg(long, value_enum)]
        against: Against,
        /// Inclusive fit window `lo,hi`.
        #[arg(long)]
        range: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Against {
    #[value(name = "theta")]
    Theta,
    #[value(name = "W")]
    W,
}

fn parse_range(text: &str) -> Result<(f64, f64)> {
    let bad = || Error::Config {
        key: "range".into(),
        message: format!("expected `lo,hi`, got `{text}`"),
    };
    let (lo, hi) = text.split_once(',').ok_or_else(bad)?;
    let lo = boomerang_walk::config::parse_angle(lo).ok_or_else(bad)?;
    let hi = boomerang_walk::config::parse_angle(hi).ok_or_else(bad)?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn report(manifest: &RunManifest, spec: &ExperimentSpec) {
    println!(
        "{} finished in {:.1} s (seed {}), wrote to {}:",
        manifest.preset,
        manifest.duration.as_secs_f64(),
        manifest.master_seed,
        spec.output_dir.display()
    );
    for (file, sum) in &manifest.checksums {
        println!("  {sum}  {file}");
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config } => {
            let text = fs::read_to_string(&config).map_err(|source| Error::Io {
                path: config.clone(),
                source,
            })?;
            let spec = parse_config(&text)?;
            let manifest = run_experiment(&spec)?;
            report(&manifest, &spec);
        }
        Command::Preset { name, seed, out } => {
            let preset: Preset = name.parse()?;
            if preset == Preset::Custom {
                return Err(Error::Config {
                    key: "preset".into(),
                    message: "custom runs need a configuration file; use `qbwalk run`".into(),
                });
            }
            let mut spec = ExperimentSpec::new(preset);
            spec.overrides.master_seed = seed;
            if let Some(out) = out {
                spec.output_dir = out;
            }
            let manifest = run_experiment(&spec)?;
            report(&manifest, &spec);
        }
        Command::Fit {
            csv,
            column,
            against,
            range,
        } => {
            let against = match against {
                Against::Theta => SweepParameter::Theta,
                Against::W => SweepParameter::DisorderWidth,
            };
            let fit = fit_csv(&csv, &column, against, parse_range(&range)?)?;
            println!("exponent = {:.6}", fit.exponent);
            println!("prefactor = {:.6e}", fit.log_prefactor.exp());
            println!("r_squared = {:.6}", fit.r_squared);
            println!("points = {}", fit.points);
        }
    }
    Ok(())
}

fn configure_workers() -> Result<()> {
    let Ok(value) = std::env::var(WORKERS_VAR) else {
        return Ok(());
    };
    let bad = |message: String| Error::Config {
        key: WORKERS_VAR.into(),
        message,
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| bad(format!("expected a positive integer, got `{value}`")))?;
    if n == 0 {
        return Err(bad("must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| bad(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match configure_workers().and_then(|()| execute(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
