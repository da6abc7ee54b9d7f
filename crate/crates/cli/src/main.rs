//! `mnat`: command-line checks for exchange properties of set functions.
//!
//! Exit status: 0 when the property holds, 2 when it fails (with a witness),
//! 1 for usage and input errors.

mod commands;
mod describe;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_FAIL: u8 = 2;

/// Triple-quantified checks refuse larger ground sets without `--force`.
pub const CHECK_CAP_N: usize = 14;
/// Duality refuses larger `|Y \ X|` without `--force`.
pub const DUALITY_CAP_Y0: usize = 10;

#[derive(Parser, Debug)]
#[command(name = "mnat", version, about = "Verify exchange properties of set functions and set families")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    /// Omit elapsed times so identical runs give identical output.
    #[arg(long, global = true)]
    pub no_timing: bool,
    /// Lift the size caps on exhaustive checks and the dual search.
    #[arg(long, global = true)]
    pub force: bool,
    /// Worker threads for the parallel sweeps.
    #[arg(long, env = "MNAT_THREADS", global = true)]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropertyArg {
    #[value(name = "mnat-exc")]
    MnatExc,
    #[value(name = "mnat-exc-m")]
    MnatExcM,
    #[value(name = "valuated-matroid")]
    ValuatedMatroid,
    Local,
    Snc,
    #[value(name = "bnat-exc")]
    BnatExc,
    #[value(name = "bnat-exc-m")]
    BnatExcM,
    #[value(name = "bnat-exc-pm")]
    BnatExcPm,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Uniform,
    Partition,
    Graphic,
    Free,
    #[value(name = "modular-concave")]
    ModularConcave,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenOutput {
    /// Weights on bases, −∞ elsewhere.
    Weighted,
    /// Weights on independent sets, −∞ elsewhere.
    Independent,
    /// Rank function plus weights.
    Rank,
    /// The basis family.
    Bases,
}

#[derive(Args, Debug, Clone)]
pub struct Triple {
    /// X as a comma-separated list of 1-based elements ("" for the empty set).
    #[arg(long = "x", allow_hyphen_values = true)]
    pub x: String,
    #[arg(long = "y", allow_hyphen_values = true)]
    pub y: String,
    #[arg(long = "i", allow_hyphen_values = true, default_value = "")]
    pub i: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide a property of a set function or set family.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = PropertyArg::MnatExc)]
        property: PropertyArg,
    },
    /// Find J ⊆ Y \ X for the multiple exchange at (X, Y, I).
    Exchange {
        file: PathBuf,
        #[command(flatten)]
        triple: Triple,
    },
    /// Compare the slice primal with the dual over the integer price box.
    Duality {
        file: PathBuf,
        #[command(flatten)]
        triple: Triple,
        /// Box radius (integer or p/q); defaults to 2·(max f − min f) + 1.
        #[arg(long)]
        radius: Option<String>,
    },
    /// Print the demand correspondence at the given prices.
    Demand {
        file: PathBuf,
        /// Comma-separated prices, integers or p/q.
        #[arg(long, allow_hyphen_values = true)]
        prices: String,
    },
    /// Run the exact checks and the sampled gross-substitutes conditions.
    Equivalence {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random price points on top of the integer sweep.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Grid step for random prices (p/q).
        #[arg(long, default_value = "1/2")]
        step: String,
    },
    /// Write a generated instance as JSON.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated element weights.
        #[arg(long, allow_hyphen_values = true)]
        weights: Option<String>,
        /// Partition blocks, e.g. "1,2;3".
        #[arg(long)]
        blocks: Option<String>,
        /// Partition capacities, e.g. "1,1".
        #[arg(long)]
        caps: Option<String>,
        /// Graph vertex count for graphic matroids.
        #[arg(long)]
        vertices: Option<usize>,
        /// Graph edges, e.g. "1-2,2-3,1-3".
        #[arg(long)]
        edges: Option<String>,
        /// Concave sequence g(0..=n) for modular-concave.
        #[arg(long, allow_hyphen_values = true)]
        g: Option<String>,
        /// What to emit for matroid kinds; defaults to weighted when weights are given, else rank.
        #[arg(long = "as", value_enum)]
        output_as: Option<GenOutput>,
        /// Write to this file instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.global.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_INPUT);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure the thread pool: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match commands::run(&cli) {
        Ok(output) => {
            print!("{}", output.text);
            ExitCode::from(output.code)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
