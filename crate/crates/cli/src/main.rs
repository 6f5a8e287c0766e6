//! `powcirc`: command line front end.
//!
//! Exit codes: 0 trivial / equal / success, 1 nontrivial / unequal,
//! 2 input error, 3 not a power circuit, 4 undefined swap.

mod bench;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use powcirc::oracle::{DEFAULT_BIT_BUDGET, DEFAULT_EXP_CAP};

#[derive(Parser, Debug)]
#[command(
    name = "powcirc",
    version,
    about = "Power circuits and word problems built on them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Power circuit operations.
    #[command(subcommand)]
    Pc(PcCmd),
    /// ℤ[1/2]⋊ℤ programs with swaps.
    #[command(subcommand)]
    Sdp(SdpCmd),
    /// Word problems.
    #[command(subcommand)]
    Wp(WpCmd),
    /// Reference evaluation and generators.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Timing series as CSV rows `size,time_ms,peak_nodes,ops`.
    Bench(BenchArgs),
}

#[derive(Subcommand, Debug)]
pub enum PcCmd {
    /// Reduce a circuit to tree representation and print it with stats.
    Reduce {
        circuit: PathBuf,
        /// Also write the reduced circuit as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Compare two named markings; prints LT/EQ/GT and the gap flag.
    Cmp {
        circuit: PathBuf,
        m: String,
        k: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum SdpCmd {
    /// Evaluate a program (`lit <u> <m>`, `mul`, `swap`; one per line).
    Eval {
        program: PathBuf,
        /// Print the result as circuit JSON even when it fits in 64 bits.
        #[arg(long)]
        json: bool,
    },
    /// Decide whether two programs denote the same element.
    Eq { p1: PathBuf, p2: PathBuf },
}

#[derive(Args, Debug)]
pub struct WpArgs {
    /// The word, or `@path` to read it from a file.
    pub word: String,
    #[arg(long)]
    pub stats: bool,
    /// Print verdict and stats as one JSON object.
    #[arg(long)]
    pub json: bool,
    /// Use the reference solver over explicit numbers.
    #[arg(long)]
    pub reference: bool,
    /// Bit cap for the reference solver.
    #[arg(long, default_value_t = DEFAULT_EXP_CAP)]
    pub exp_cap: u64,
}

#[derive(Subcommand, Debug)]
pub enum WpCmd {
    /// Words over a, t, b (uppercase = inverse, `^<int>` exponents).
    Baumslag(WpArgs),
    /// Words over a1..a4 (uppercase = inverse, `^<int>` exponents).
    Higman(WpArgs),
}

#[derive(Subcommand, Debug)]
pub enum OracleCmd {
    /// Exact value of a named marking.
    Eval {
        circuit: PathBuf,
        marking: String,
        #[arg(long, default_value_t = DEFAULT_BIT_BUDGET)]
        bit_budget: u64,
    },
    /// Print a word that is trivial by construction.
    GenTrivial {
        group: String,
        seed: u64,
        len: usize,
    },
    /// Print a seeded random circuit as JSON.
    GenCircuit {
        seed: u64,
        nodes: usize,
        density: f64,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// baumslag-tower-commutator, higman-tower-identity or maketree-random.
    pub family: String,
    /// Comma separated sizes.
    #[arg(long, value_delimiter = ',')]
    pub bench_sizes: Vec<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Why a command stopped without an answer.
#[derive(Debug)]
pub enum Fail {
    Input(String),
    NotAPowerCircuit,
}

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Pc(c) => commands::pc(c),
        Cmd::Sdp(c) => commands::sdp(c),
        Cmd::Wp(c) => commands::wp(c),
        Cmd::Oracle(c) => commands::oracle(c),
        Cmd::Bench(b) => bench::run(&b),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(Fail::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Fail::NotAPowerCircuit) => {
            eprintln!("not a power circuit");
            ExitCode::from(3)
        }
    }
}
