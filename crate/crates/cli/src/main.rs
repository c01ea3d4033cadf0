//! `p3p`: solve, classify, sweep and verify from the command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 optical center
//! on a toroid pair, 4 degenerate sweep path, 5 a check found a violation.

mod commands;
mod error;
mod scene;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use p3p_core::experiments::{DEFAULT_DELTA, MIN_STEPS};

use crate::commands::{Common, Format};

#[derive(Debug, Parser)]
#[command(name = "p3p", version, about = "P3P solving and multi-solution analysis")]
struct Cli {
    /// Scene file (JSON).
    #[arg(long, global = true)]
    scene: Option<PathBuf>,
    /// Residual tolerance for accepted depth triplets.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the scene's view and classify every real root.
    Solve,
    /// Report the optical center against the six triangle toroids.
    Region,
    /// Walk the scene's path and judge every toroid crossing.
    Sweep {
        #[arg(long, default_value_t = 2 * MIN_STEPS)]
        steps: usize,
        /// Before/after offset from a crossing, as a fraction of the path.
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        /// Events CSV; defaults to `<out stem>_events.csv` next to `--out`.
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Run a verification campaign.
    Verify {
        /// 1, 2, 3, 4, 5, lemmas, sign-law or ground-truth.
        #[arg(long)]
        theorem: String,
        /// Samples, or paths for the crossing campaigns.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// equilateral, acute, obtuse or side lengths `a,b,c`.
        #[arg(long)]
        triangle: Option<String>,
    },
    /// Cross-check the solver against the brute-force oracle.
    Oracle {
        /// Grid resolution per toroid parameter.
        #[arg(long, default_value_t = 512)]
        grid: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = Common {
        scene: cli.scene,
        tol: cli.tol,
        seed: cli.seed,
        format: cli.format,
        out: cli.out,
    };
    let result = match &cli.command {
        Command::Solve => commands::solve(&common),
        Command::Region => commands::region(&common),
        Command::Sweep { steps, delta, events } => commands::sweep(&common, *steps, *delta, events.as_deref()),
        Command::Verify {
            theorem,
            trials,
            triangle,
        } => commands::verify(&common, theorem, *trials, triangle.as_deref()),
        Command::Oracle { grid } => commands::oracle(&common, *grid),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
