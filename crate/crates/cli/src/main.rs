//! `greenloop` — build, solve, compare, and plot bi-objective closed-loop
//! supply chain network designs.
//!
//! Exit codes: 0 success, 2 input error, 3 infeasible, 4 resource limit,
//! 5 verification failure.

mod commands;
mod manifest;
mod svg;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub(crate) const EXIT_OK: u8 = 0;
pub(crate) const EXIT_INPUT: u8 = 2;
pub(crate) const EXIT_INFEASIBLE: u8 = 3;
pub(crate) const EXIT_LIMIT: u8 = 4;
pub(crate) const EXIT_VERIFY: u8 = 5;

/// Environment variable holding the default output directory; relative
/// `--out` paths are resolved against it when set.
pub(crate) const OUT_DIR_ENV: &str = "GREENLOOP_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "greenloop",
    version,
    about = "Bi-objective closed-loop supply chain network design: exact ε-constraint sweeps, a multi-objective GA, and front comparison"
)]
struct Cli {
    /// Cap on worker threads for parallel sections (default: all cores).
    /// Results are identical for any cap.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load an instance, report dimensions and parameter summaries, and
    /// probe feasibility with one LP relaxation solve.
    Validate {
        instance: PathBuf,
        /// Write the cost-mode constraint matrix as plain text.
        #[arg(long)]
        dump_lp: Option<PathBuf>,
    },
    /// Solve an instance for a Pareto front.
    Solve {
        #[command(subcommand)]
        method: SolveCommand,
    },
    /// Compare two front files from the same instance.
    Compare {
        front_a: PathBuf,
        front_b: PathBuf,
        /// Text report path; a CSV sidecar is written next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a seeded random instance (or write a bundled one).
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dimensions as F,W,C,I,TF,TW,TK,TI.
        #[arg(long, default_value = "2,2,2,2,1,1,1,1")]
        dims: String,
        /// Capacity headroom over minimum stage requirements.
        #[arg(long, default_value_t = 1.5)]
        margin: f64,
        /// Write a bundled instance instead of sampling: `case` or
        /// `tradeoff`.
        #[arg(long)]
        bundled: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check the exact solvers against brute-force enumeration.
    Verify {
        instance: PathBuf,
        /// Grid points for the sweep-equivalence check.
        #[arg(long, default_value_t = 8)]
        grid: usize,
    },
    /// Render one or more front files as a standalone SVG with a CSV
    /// sidecar.
    Plot {
        fronts: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum SolveCommand {
    /// Exact ε-constraint sweep (simplex + branch and bound).
    Eps {
        instance: PathBuf,
        /// Grid points over the constrained objective.
        #[arg(long, default_value_t = 20)]
        grid: usize,
        /// Allow fractional facility indicators in [0, 1].
        #[arg(long)]
        relaxed: bool,
        #[arg(long)]
        out: PathBuf,
        /// Also export the front as CSV (f1,f2,method,epsilon_or_gen,proven).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Multi-objective genetic algorithm.
    Ga {
        instance: PathBuf,
        #[arg(long, default_value_t = 100)]
        pop: usize,
        #[arg(long, default_value_t = 250)]
        gens: u64,
        #[arg(long)]
        seed: u64,
        /// Allow fractional facility indicators in [0, 1].
        #[arg(long)]
        relaxed: bool,
        #[arg(long)]
        out: PathBuf,
        /// Write a per-generation CSV trace (generation, best f1, best f2,
        /// feasible count).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Also export the front as CSV (f1,f2,method,epsilon_or_gen,proven).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[cfg(feature = "parallel")]
fn with_pool<T: Send>(threads: Option<usize>, run: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("worker pool")
            .install(run),
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_pool<T>(_threads: Option<usize>, run: impl FnOnce() -> T) -> T {
    run()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    let code = match cli.command {
        Command::Validate { instance, dump_lp } => commands::validate(&instance, dump_lp.as_deref()),
        Command::Solve { method } => match method {
            SolveCommand::Eps {
                instance,
                grid,
                relaxed,
                out,
                csv,
            } => with_pool(threads, || {
                commands::solve_eps(&instance, grid, relaxed, &out, csv.as_deref(), threads)
            }),
            SolveCommand::Ga {
                instance,
                pop,
                gens,
                seed,
                relaxed,
                out,
                trace,
                csv,
            } => with_pool(threads, || {
                commands::solve_ga(
                    &instance,
                    pop,
                    gens,
                    seed,
                    relaxed,
                    &out,
                    trace.as_deref(),
                    csv.as_deref(),
                    threads,
                )
            }),
        },
        Command::Compare { front_a, front_b, out } => commands::compare(&front_a, &front_b, &out),
        Command::Gen {
            seed,
            dims,
            margin,
            bundled,
            out,
        } => commands::gen(seed, &dims, margin, bundled.as_deref(), &out),
        Command::Verify { instance, grid } => {
            with_pool(threads, || commands::verify(&instance, grid))
        }
        Command::Plot { fronts, out } => commands::plot(&fronts, &out),
    };
    ExitCode::from(code)
}
