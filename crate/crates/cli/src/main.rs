//! Command-line front end for the lost-sales bounds library.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "lsbounds", version, about = "Lost-sales (r, q) inventory bounds, conversions and simulation")]
#[command(subcommand_required = true, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Round real-valued fields to four decimals.
    #[arg(long, global = true)]
    pub round4: bool,

    /// Root seed for simulations.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for grid commands (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Demand given either as `x` or as a rate and lead time.
#[derive(Debug, Clone, Args)]
#[group(id = "demand", required = true, multiple = true)]
pub struct DemandArgs {
    /// Mean lead-time demand (lead time taken as 1).
    #[arg(long, conflicts_with_all = ["lambda", "tau"])]
    pub x: Option<f64>,

    /// Poisson demand rate.
    #[arg(long, requires = "tau")]
    pub lambda: Option<f64>,

    /// Constant lead time.
    #[arg(long, requires = "lambda")]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Args)]
#[group(id = "measure", required = true, multiple = false)]
pub struct MeasureArgs {
    /// Long-run fraction of time out of stock.
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Average on-hand inventory.
    #[arg(long = "L", value_name = "L")]
    pub level: Option<f64>,

    /// Average inventory position.
    #[arg(long = "P", value_name = "P")]
    pub position: Option<f64>,

    /// Average units on order.
    #[arg(long = "U", value_name = "U")]
    pub on_order: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Loss function, Erlang loss and both bounds on the lost fraction.
    #[command(allow_negative_numbers = true)]
    Bounds {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        demand: DemandArgs,
    },
    /// Convert one of gamma, L, P, U into all four.
    #[command(allow_negative_numbers = true)]
    Convert {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        x: f64,
        #[command(flatten)]
        measure: MeasureArgs,
    },
    /// Simulate the system and report estimates next to the bounds.
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        demand: DemandArgs,
        /// Measured demands after warm-up.
        #[arg(long, default_value_t = 1_000_000)]
        demands: u64,
        /// Warm-up demands [default: max(10 (r + q), 10000)].
        #[arg(long)]
        warmup: Option<u64>,
        #[arg(long, default_value_t = lostsales::sim::DEFAULT_BATCHES)]
        batches: usize,
    },
    /// Bound aggregates over q = 2..r on the standard (r, K) grid.
    #[command(allow_negative_numbers = true)]
    Table2 {
        /// Compare against the published values; exit 5 on any difference above 1e-4.
        #[arg(long)]
        compare_paper: bool,
    },
    /// Worst bound gap per reorder point over a K sweep.
    #[command(allow_negative_numbers = true)]
    Figure1 {
        #[arg(long, default_value_t = 100)]
        r_max: u64,
        #[arg(long, default_value_t = 0.5)]
        k_min: f64,
        #[arg(long, default_value_t = 1.5)]
        k_max: f64,
        #[arg(long, default_value_t = 0.01)]
        k_step: f64,
    },
    /// Simulate a grid of systems and check bounds and identities; exit 5 on any failure.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        rs: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,5")]
        qs: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        ks: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        demands: u64,
        #[arg(long, default_value_t = 3.0)]
        k_sigma: f64,
    },
    /// Smallest reorder point whose upper bound meets a lost-fraction target.
    #[command(allow_negative_numbers = true)]
    MinR {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        target: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lsbounds: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
