use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qhe::commands::{cmd_experiment, cmd_mitigate, cmd_simulate, cmd_theory, require_dir};
use qhe::error::EXIT_USAGE;
use qhe::report::cmd_report;
use qhe::{with_thread_pool, Overrides, Result, RunConfig};

/// Three-level quantum heat engine laboratory.
#[derive(Parser)]
#[command(name = "qhe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// GAD steps per circuit.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    runs: Option<u32>,
    /// JSON noise model, replacing the one in the config.
    #[arg(long)]
    noise: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Rate-equation (and driven master-equation) trace on a dense grid.
    Theory(Common),
    /// Ideal engine circuit: exact and sampled populations.
    Simulate(Common),
    /// Noisy engine circuit: sampled populations and raw counts.
    Experiment(Common),
    /// Readout-calibrated populations from earlier raw counts.
    Mitigate {
        #[command(flatten)]
        common: Common,
        /// Directory holding counts.json (defaults to --out).
        #[arg(long)]
        raw: Option<PathBuf>,
        /// Reuse calibration matrices from an earlier calibration.json.
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Figure-data bundle with manifest.
    Report {
        #[command(flatten)]
        common: Common,
        /// Directories with traces from earlier runs of the same config.
        #[arg(long)]
        from: Vec<PathBuf>,
    },
}

fn load(c: &Common) -> Result<RunConfig> {
    let overrides =
        Overrides { seed: c.seed, steps: c.steps, shots: c.shots, runs: c.runs, noise: c.noise.clone() };
    RunConfig::load(&c.config, &overrides)
}

fn run(cmd: Command) -> Result<Vec<PathBuf>> {
    match cmd {
        Command::Theory(c) => cmd_theory(&load(&c)?, &c.out),
        Command::Simulate(c) => cmd_simulate(&load(&c)?, &c.out),
        Command::Experiment(c) => cmd_experiment(&load(&c)?, &c.out),
        Command::Mitigate { common, raw, calibration } => {
            let cfg = load(&common)?;
            let raw = raw.unwrap_or_else(|| common.out.clone());
            require_dir(&raw)?;
            cmd_mitigate(&cfg, &common.out, &raw, calibration.as_deref())
        }
        Command::Report { common, from } => {
            let cfg = load(&common)?;
            let manifest = cmd_report(&cfg, &common.out, &from)?;
            let mut files: Vec<PathBuf> = manifest.figures.iter().map(|f| common.out.join(&f.file)).collect();
            files.push(common.out.join(qhe::io::MANIFEST_FILE));
            Ok(files)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match with_thread_pool(|| run(cli.command)) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
