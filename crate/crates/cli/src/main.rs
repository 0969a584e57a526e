//! `compfn`: batch front end. Every command writes one report (JSON or CSV)
//! and exits 0 on success, 2 when an acceptance check fails, 1 on error.

mod commands;
mod system;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "compfn", version, about = "Compensation functions for factor maps of shifts of finite type")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every random choice; required by stochastic commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct SpecArg {
    /// System description (JSON).
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Irreducibility, a shortest diamond and the finite-to-one classification.
    Analyze {
        #[command(flatten)]
        spec: SpecArg,
        /// Longest diamond searched for.
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Forbidden words of the MPW subshift approximation and a swap pair.
    Mpw {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Context length for the swap-pair uniqueness check.
        #[arg(long, default_value_t = 8)]
        context_len: usize,
    },
    /// Topological pressure of a locally constant potential.
    Pressure {
        #[command(flatten)]
        spec: SpecArg,
        /// Potential file `{range, offset, table}`; zero when omitted.
        #[arg(long)]
        potential: Option<PathBuf>,
    },
    /// The equilibrium Markov measure of a locally constant potential.
    Equilibrium {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        potential: Option<PathBuf>,
    },
    /// Compares P_X(f + φ∘π) with P_Y(φ) over a family of φ.
    CheckCompensation {
        #[command(flatten)]
        spec: SpecArg,
        /// Potential f; when omitted, the compensation function with `--t`
        /// and `--radius` is used.
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Comma-separated grid values for range-1 and range-2 φ tables.
        #[arg(long, default_value = "-2,-1,0,1,2", allow_hyphen_values = true)]
        phi_grid: String,
        /// Highest range of the grid tables (1 or 2).
        #[arg(long, default_value_t = 2)]
        phi_range: usize,
        /// Extra random range-2 tables; needs `--seed` when positive.
        #[arg(long, default_value_t = 50)]
        phi_random: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Variations and p-Dini verdicts for the compensation function.
    Dini {
        #[command(flatten)]
        spec: SpecArg,
        /// Comma-separated exponents.
        #[arg(long, default_value = "1,1.1,1.5,2")]
        p: String,
        /// Largest n with var_n computed exactly (at least 2).
        #[arg(long, default_value_t = 6)]
        radius: usize,
        /// Scale t; chosen by `--epsilon` when omitted.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Pins of a word, n(x) at a position and the number of pinnings.
    Clothespin {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        word: String,
        /// Position for n(x); the middle of the word when omitted.
        #[arg(long)]
        center: Option<usize>,
        #[arg(long, default_value_t = 0)]
        start: usize,
    },
    /// Return statistics of pins on a sampled path, with the Kac check.
    Returns {
        #[command(flatten)]
        spec: SpecArg,
        /// Sampler: equilibrium state of this potential (zero when omitted).
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        length: usize,
    },
    /// Entropy gain against integral change under marked swaps.
    SimulateTradeoff {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value = "0.1,0.05,0.02,0.01")]
        p_grid: String,
        #[arg(long, default_value_t = 1_000_000)]
        length: usize,
        /// Number of independent replicates.
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        /// Swap both ways (u ↔ v).
        #[arg(long)]
        both_ways: bool,
        /// i.i.d. base measure, e.g. `a:0.5,c:0.5`.
        #[arg(long)]
        base: String,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Kac and Abramov identities for a cylinder.
    CheckKacAbramov {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        cylinder: String,
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        length: usize,
    },
    /// d̄ mismatch of the marker process against its Bernoulli source.
    Dbar {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Validates a system description.
    Validate { path: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Runs the command and writes its report; `Ok(false)` is a failed check.
fn run(cli: &Cli) -> Result<bool> {
    let report = commands::execute(cli)?;
    let text = match cli.format {
        Format::Json => report.json(),
        Format::Csv => report.csv(),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e).context("writing the report"),
                _ => {}
            }
        }
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(report.pass.unwrap_or(true))
}
