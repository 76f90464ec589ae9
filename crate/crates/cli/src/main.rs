//! `coord-risk`: stable outcomes, risk curves and tradeoff frontiers of
//! graphical coordination games under adversarial attack.
//!
//! Exit codes: 0 success, 1 a verification suite failed, 2 invalid input,
//! 3 a resource cap was exceeded.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "coord-risk", version, about = "Risk of graphical coordination games under broad and focused attacks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// True payoff premium of x over y; must be positive.
    #[arg(long, global = true, default_value = "1/4")]
    alpha_sys: String,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Print exact values as 17-digit decimals instead of p/q.
    #[arg(long, global = true)]
    decimal: bool,
}

/// Where the graph and attack come from.
#[derive(Debug, Args, Clone, Default)]
pub struct Source {
    /// Graph file (.json or edge list) or generator: line:N, star:N, ring:N, complete:N, random:N:P:SEED.
    #[arg(long)]
    graph: Option<String>,
    /// Attack file, inline JSON, or shorthand `broad:Y_NODES` (others get x imposters) or `focused:X_NODES/Y_NODES`.
    #[arg(long)]
    attack: Option<String>,
    /// Instance file holding both graph and attack.
    #[arg(long, conflicts_with_all = ["graph", "attack"])]
    instance: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Stochastically stable set, welfare-minimizing outcome and risk of one instance.
    Sss {
        #[command(flatten)]
        source: Source,
        /// Operator gain, or a comma-separated list.
        #[arg(long)]
        alpha: String,
    },
    /// Worst-case risks, expected risks of a randomized strategy, or tradeoff bounds.
    Risk {
        #[command(flatten)]
        source: Source,
        /// Gains to evaluate deterministically (comma-separated).
        #[arg(long)]
        alpha: Option<String>,
        /// Gains of a randomized strategy (comma-separated).
        #[arg(long, requires = "probs", conflicts_with = "alpha")]
        gains: Option<String>,
        #[arg(long)]
        probs: Option<String>,
        /// Broad-risk budget: print the focused-risk lower bound.
        #[arg(long)]
        gamma_b: Option<String>,
        /// Focused-risk budget: print the broad-risk lower bound.
        #[arg(long)]
        gamma_f: Option<String>,
    },
    /// Worst-case risk curves (and an instance's risk) on a gain grid `(from, to]`.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long, default_value = "0")]
        from: String,
        #[arg(long, default_value = "2")]
        to: String,
    },
    /// Pareto frontier of a randomized gain vector.
    Frontier {
        /// Comma-separated gains, or `staircase:M:EPS`.
        #[arg(long, required_unless_present = "strategy")]
        gains: Option<String>,
        /// Strategy JSON file `{"gains": [...], "probs": [...]}`.
        #[arg(long, conflicts_with = "gains")]
        strategy: Option<PathBuf>,
        /// Evaluate this distribution instead of computing the frontier.
        #[arg(long)]
        probs: Option<String>,
        #[arg(long, default_value_t = coord_risk::randomized::DEFAULT_GRID)]
        grid: usize,
        /// Baseline gains: report whether `--gains` dominates them.
        #[arg(long, conflicts_with = "probs")]
        against: Option<String>,
    },
    /// Build a worst-case instance, or reduce an instance to an imposter star.
    Construct {
        #[arg(long, value_enum)]
        kind: commands::Kind,
        /// Star size for broad-star.
        #[arg(long)]
        k: Option<usize>,
        /// Gain for focused-star and reduce.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        y_leaves: Option<usize>,
        #[arg(long)]
        x_leaves: Option<usize>,
        #[command(flatten)]
        source: Source,
    },
    /// Log-linear learning: simulated visit frequencies against the exact chain.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1_000_000)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the property suites.
    Verify {
        /// Comma-separated suite ids (default: all).
        #[arg(long)]
        only: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = commands::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
