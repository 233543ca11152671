//! `faircheck`: liveness checking on .aut models under completeness criteria.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Checks liveness properties of labelled transition systems under
/// progress, justness and fairness assumptions.
#[derive(Parser, Debug)]
#[command(name = "faircheck", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit `key<TAB>value` lines instead of prose.
    #[arg(long, global = true)]
    porcelain: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the property's formulas and evaluate them on the model.
    Check {
        lts: PathBuf,
        property: PathBuf,
        #[command(flatten)]
        formula: FormulaArgs,
        /// Cross-check the verdict with the bounded path search.
        #[arg(long)]
        with_oracle: bool,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Print the property's formulas without evaluating them.
    Generate {
        lts: PathBuf,
        property: PathBuf,
        #[command(flatten)]
        formula: FormulaArgs,
    },
    /// Check a concurrency relation (interference list) against a model.
    ValidateConc { lts: PathBuf, relation: PathBuf },
    /// Evaluate the criterion predicates on a finite path or lasso.
    CheckTrace {
        lts: PathBuf,
        trace: PathBuf,
        /// Comma-separated criteria; all six by default.
        #[arg(long)]
        criteria: Option<String>,
        /// Blocking actions, e.g. "order, to_cash"; empty by default.
        #[arg(long)]
        blocking: Option<String>,
        /// Interference list used for justness; the empty relation otherwise.
        #[arg(long)]
        conc: Option<PathBuf>,
        /// Also report whether the trace violates this property.
        #[arg(long)]
        property: Option<PathBuf>,
    },
    /// Cross-validate formulas against the path search on random models.
    Crossval {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        criteria: Option<String>,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
}

#[derive(Args, Debug)]
struct FormulaArgs {
    /// Blocking actions, overriding the property file.
    #[arg(long)]
    blocking: Option<String>,
    /// Largest number of non-blocking actions for strong criteria.
    #[arg(long, default_value_t = faircheck_core::templates::DEFAULT_SUBSET_CAP)]
    subset_cap: usize,
    /// Print formulas after simplification.
    #[arg(long)]
    simplify: bool,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    bounds_stem: Option<usize>,
    #[arg(long)]
    bounds_cycle: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = output::Output::new(cli.porcelain);
    let code = match commands::run(cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("faircheck: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code)
}
