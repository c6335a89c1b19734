use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use leaky_cli::commands;
use leaky_cli::config::{Overrides, RunConfig, SuiteConfig};
use leaky_cli::output::Artifacts;
use leaky_cli::RunError;

#[derive(Parser)]
#[command(name = "leaky", version, about = "Complex eigenvalues of hyperplane delta potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a region, refine the candidates and write the eigenvalues.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        d: Option<usize>,
        /// Seed of a random-bumps potential.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the eigenvalue inequalities on a saved eigenvalue list.
    Bounds {
        #[arg(long)]
        eigs: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the resolvent ratios over arg z and |z|.
    Sobolev {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Calibrate the constants on a suite of random potentials.
    Calibrate {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the eigenvalues of a planar potential against the full 2D operator.
    Oracle2d {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path, o: &Overrides) -> Result<(RunConfig, Vec<u8>), RunError> {
    let bytes = std::fs::read(path).map_err(|e| RunError::Config(format!("config: cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| RunError::Config(format!("config: {e}")))?;
    let mut cfg = RunConfig::from_toml(&text)?;
    cfg.apply(o)?;
    Ok((cfg, bytes))
}

fn resolved<T: serde::Serialize>(cfg: &T) -> Result<serde_json::Value, RunError> {
    serde_json::to_value(cfg).map_err(|e| RunError::Io(format!("json: {e}")))
}

/// Runs `body` with an artifact writer and always leaves a manifest behind.
fn with_artifacts(
    dir: &Path,
    name: &str,
    config: serde_json::Value,
    input: &[u8],
    body: impl FnOnce(&mut Artifacts) -> Result<(), RunError>,
) -> Result<(), RunError> {
    let mut out = Artifacts::new(dir, name, config)?;
    out.hash_input(input);
    let result = body(&mut out);
    out.finish(result.as_ref().err())?;
    result
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Scan { config, gamma, d, seed, out } => {
            let (cfg, bytes) = load(&config, &Overrides { gamma, d, seed, out })?;
            with_artifacts(&cfg.output_dir, "scan", resolved(&cfg)?, &bytes, |a| commands::scan(&cfg, a))
        }
        Command::Bounds { eigs, config, out } => {
            let (cfg, bytes) = load(&config, &Overrides { out, ..Default::default() })?;
            with_artifacts(&cfg.output_dir, "bounds", resolved(&cfg)?, &bytes, |a| {
                let list = commands::read_eigenvalues(&eigs, a)?;
                commands::bounds(&cfg, &list, a)
            })
        }
        Command::Sobolev { config, out } => {
            let (cfg, bytes) = load(&config, &Overrides { out, ..Default::default() })?;
            with_artifacts(&cfg.output_dir, "sobolev", resolved(&cfg)?, &bytes, |a| commands::sobolev(&cfg, a))
        }
        Command::Calibrate { suite, out } => {
            let bytes = std::fs::read(&suite)
                .map_err(|e| RunError::Config(format!("suite: cannot read {}: {e}", suite.display())))?;
            let mut cfg = SuiteConfig::load(&suite)?;
            if let Some(dir) = out {
                cfg.output_dir = dir;
            }
            with_artifacts(&cfg.output_dir, "calibrate", resolved(&cfg)?, &bytes, |a| commands::calibrate(&cfg, a))
        }
        Command::Oracle2d { config, out } => {
            let (cfg, bytes) = load(&config, &Overrides { out, ..Default::default() })?;
            with_artifacts(&cfg.output_dir, "oracle2d", resolved(&cfg)?, &bytes, |a| commands::oracle2d(&cfg, a))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("leaky: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
