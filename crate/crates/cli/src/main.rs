//! `qdp`: command-line driver for the qdp engine.
//!
//! Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 usage
//! or parse error, 3 internal error.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qdp", version, about = "Exact checks of Drinfeld's functors on truncated Hopf presentations")]
pub struct Cli {
    /// h-adic truncation order N.
    #[arg(long, global = true, env = "QDP_DEFAULT_ORDER", default_value_t = qdp::examples::DEFAULT_ORDER,
          value_parser = clap::value_parser!(i64).range(1..))]
    pub h_order: i64,

    /// Degree cap D.
    #[arg(long, global = true, default_value_t = qdp::examples::DEFAULT_DEGREE,
          value_parser = clap::value_parser!(u32).range(1..))]
    pub degree: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Run everything on one thread.
    #[arg(long, global = true)]
    pub no_parallel: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Via {
    Delta,
    Pairing,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Dir {
    PrimeVee,
    VeePrime,
}

/// A target is a built-in name, a built-in name with a trailing `'` for
/// its prime, or a path to a manifest.
#[derive(Subcommand, Debug)]
pub enum Command {
    /// Names of the built-in examples.
    List,
    /// Describe a built-in example.
    Show {
        name: String,
        /// Print the manifest JSON instead.
        #[arg(long)]
        manifest: bool,
    },
    /// Hopf axioms on all monomials up to a degree.
    CheckHopf {
        target: String,
        #[arg(long, default_value_t = 3)]
        bound: u32,
    },
    /// Overlap resolution of the relations.
    Diamond { target: String },
    /// The Drinfeld functor H -> H'.
    Prime {
        target: String,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// The Drinfeld functor F -> F^vee.
    Vee {
        target: String,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Membership of an element in H'.
    Member {
        target: String,
        #[arg(long)]
        element: String,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, value_enum, default_value_t = Via::Delta)]
        via: Via,
    },
    /// Extract and validate the classical limit.
    Limit { target: String },
    /// Functor, limit and comparison with the expected dual.
    DualCheck { name: String },
    /// Compare a presentation with its image under two functors.
    Roundtrip {
        target: String,
        #[arg(long, value_enum)]
        direction: Dir,
    },
    /// Evaluate a Hopf pairing.
    Pair {
        left: String,
        right: String,
        /// Seed manifest.
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        left_elem: String,
        #[arg(long)]
        right_elem: String,
    },
    /// The whole acceptance suite.
    Selftest {
        /// Seed of the random element batteries.
        #[arg(long, default_value_t = qdp::random::DEFAULT_SEED)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let threads = if cli.no_parallel { 1 } else { 0 };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(3);
        }
    };
    let run = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| pool.install(|| commands::dispatch(&cli))));
    let out = match run {
        Ok(o) => o,
        Err(_) => {
            eprintln!("error: internal panic");
            return ExitCode::from(3);
        }
    };
    if !out.stdout.is_empty() {
        print!("{}", out.stdout);
    }
    if !out.stderr.is_empty() {
        eprint!("{}", out.stderr);
    }
    ExitCode::from(out.code)
}
