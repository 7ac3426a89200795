//! `lgap`: Lagrangian bounds, hull relaxations and gap certificates from the
//! command line.

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "lgap", version, about = "Lagrangian duality gaps for integer programs over irrational lattice sets")]
pub struct Cli {
    /// Worker threads for parallel sections (default: number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory; each run writes into a subdirectory named after it.
    #[arg(long, global = true, env = "LGAP_OUT_DIR", default_value = "lgap-out")]
    pub out: PathBuf,
    /// Do not write any files.
    #[arg(long, global = true)]
    pub no_files: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArgs {
    /// Search box radius for lattice-point enumeration.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(i64).range(1..))]
    pub search_radius: i64,
    /// Radius R of the small integer rays tried by the oracle.
    #[arg(long, global = true, default_value_t = 5, value_parser = clap::value_parser!(i64).range(1..))]
    pub ray_radius: i64,
}

#[derive(Args, Debug, Clone)]
pub struct ProblemArg {
    /// Problem file, or one of the built-in names ex1, ex2, ex3.
    #[arg(long, short)]
    pub problem: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Conv,
    Closed,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate G(λ) at one multiplier vector.
    EvalDual {
        #[command(flatten)]
        problem: ProblemArg,
        /// Comma-separated multipliers, one per coupling row.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Maximize G and write the sampled trace as CSV.
    MaxDual {
        #[command(flatten)]
        problem: ProblemArg,
        /// `lo:hi` for {0} ∪ {2^lo, …, 2^hi}, or a comma-separated list of multipliers.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Ascent steps when there are several coupling rows.
        #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
    },
    /// Boxed integer hull of a planar lattice set, as CSV and SVG.
    Hull {
        #[command(flatten)]
        problem: ProblemArg,
        /// `x0,x1,y0,y1`
        #[arg(long = "box")]
        bx: String,
        /// Enlargement factor of the enumeration box.
        #[arg(long, default_value = "2")]
        enlarge: String,
        /// Add a generation-time comment to the SVG.
        #[arg(long)]
        timestamp: bool,
    },
    /// Solve the convex relaxations.
    Solve {
        #[command(flatten)]
        problem: ProblemArg,
        #[arg(long, value_enum, default_value_t = Which::Both)]
        which: Which,
    },
    /// Full gap report: v^L, v̄*, v*, gaps and certificates.
    Report {
        #[command(flatten)]
        problem: ProblemArg,
    },
    /// Classify a single rational coupling row.
    Classify {
        #[command(flatten)]
        problem: ProblemArg,
    },
    /// Farkas multipliers at a point of the closed relaxation.
    Certify {
        #[command(flatten)]
        problem: ProblemArg,
        /// Comma-separated coordinates of x*.
        #[arg(long, allow_hyphen_values = true)]
        xstar: String,
    },
    /// Search for a Slater point.
    Slater {
        #[command(flatten)]
        problem: ProblemArg,
    },
    /// Minimize a linear function over the lattice set.
    Oracle {
        #[command(flatten)]
        problem: ProblemArg,
        /// Comma-separated weights w.
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
    },
    /// Reproduce a built-in example and check its known values.
    Reproduce {
        #[arg(value_parser = ["ex1", "ex2", "ex3"])]
        name: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
