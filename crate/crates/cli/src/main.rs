//! `isoreach` command-line front end.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "isoreach",
    version,
    about = "Unambiguous reachability via min-unique limb weights"
)]
pub struct Cli {
    /// Write the machine-readable report here.
    #[arg(long, global = true, value_name = "OUT")]
    pub json: Option<PathBuf>,

    /// Deliberate fault for negative tests.
    #[arg(long, global = true, value_enum, hide = true)]
    pub fault: Option<Fault>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Hand the distance routine a census with one vertex too many.
    CorruptCensus,
    /// Replace the constructed weights with a single limb of 1 per edge.
    CorruptWeights,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a graph in edge-list format.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
        /// Output file (stdout if omitted).
        #[arg(long, global = true)]
        out: Option<PathBuf>,
        /// Emit Graphviz DOT instead of an edge list.
        #[arg(long, global = true)]
        dot: bool,
    },
    /// Build weights and decide whether T is reachable from S.
    Reach { file: PathBuf, s: usize, t: usize },
    /// Run the invariant suite on one graph.
    Verify {
        file: PathBuf,
        /// Enumerate every distance-routine call when n is at most this.
        #[arg(long, default_value_t = 8)]
        max_enum_n: usize,
    },
    /// Scaling sweep over a graph family.
    Bench {
        #[arg(long, value_enum)]
        family: BenchFamily,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum GenFamily {
    /// Uniform random simple digraph with exactly M edges.
    Random {
        n: usize,
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// ROWS x COLS grid with right and down edges.
    Grid { rows: usize, cols: usize },
    /// Stack of LAYERS diamonds.
    Diamond { layers: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchFamily {
    Random,
    Grid,
    Diamond,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
