use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use weakdisc::harness::{
    emit, mc_row, run_idp, run_sweep, run_verify, ExperimentConfig, Format, HarnessError, Metadata,
    Record, VerifyOptions,
};

#[derive(Parser)]
#[command(
    name = "weakdisc",
    version,
    about = "Weak-measurement unambiguous discrimination simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every invariant check and print a pass/fail table.
    Verify {
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One result row per sweep point.
    Sweep(RunArgs),
    /// Monte Carlo average of the success-to-error ratios at one point.
    McBeta(RunArgs),
    /// Overlap and IDP limit for the configured eta (or eta sweep).
    Idp(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
}

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, HarnessError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| HarnessError::io_at(path, e))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn write_table<R: Record>(
    args: &RunArgs,
    command: &str,
    seed: u64,
    rows: &[R],
) -> Result<(), HarnessError> {
    let mut out = open_output(&args.out)?;
    emit(&mut out, args.format, &Metadata::new(command, seed), rows)
}

fn precondition(e: weakdisc::Error) -> HarnessError {
    HarnessError::Config(e.to_string())
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Verify { quick, seed, out } => {
            let defaults = VerifyOptions::default();
            let report = run_verify(&VerifyOptions {
                quick,
                seed: seed.unwrap_or(defaults.seed),
                fault: None,
            });
            let mut w = open_output(&out)?;
            w.write_all(report.render_table().as_bytes())?;
            w.flush()?;
            let failed: Vec<&str> = report.failed().map(|c| c.name).collect();
            if !failed.is_empty() {
                return Err(HarnessError::Invariant(failed.join(", ")));
            }
        }
        Command::Sweep(args) => {
            let cfg = load(&args)?;
            write_table(&args, "sweep", cfg.seed, &run_sweep(&cfg))?;
        }
        Command::McBeta(args) => {
            let cfg = load(&args)?;
            if cfg.sweep.is_some() {
                return Err(HarnessError::Config(
                    "mc-beta runs a single point; remove `sweep`".into(),
                ));
            }
            let row = mc_row(&cfg).map_err(precondition)?;
            write_table(&args, "mc-beta", cfg.seed, &[row])?;
        }
        Command::Idp(args) => {
            let cfg = load(&args)?;
            let rows = run_idp(&cfg).map_err(precondition)?;
            write_table(&args, "idp", cfg.seed, &rows)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("weakdisc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
