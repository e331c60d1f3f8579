//! Command-line front end for the POVM toolkit.
//!
//! Structured JSON reports go to standard output; human-readable summaries
//! go to standard error. Exit codes: 0 success, 1 domain failure (an
//! invariant or claim does not hold), 2 I/O, parse, or parameter failure.

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "povmlab",
    about = "Finite-dimensional POVMs: validation, dual representations, sequential composition",
    version
)]
struct Cli {
    /// Override every numerical tolerance (default 1e-9).
    #[arg(long, global = true, env = "POVMLAB_TOLERANCE")]
    tolerance: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConvertTarget {
    /// Outcome distributions for given states.
    Statistical,
    /// Images of singleton indicators under the positive unital map.
    Vn,
    /// Kernel operators of the predual map with the trace residual.
    Predual,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariationChoice {
    ClosedForm,
    BruteForce,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeChoice {
    Fibonacci,
    OctahedralSymmetrized,
}

#[derive(Subcommand)]
enum Command {
    /// Check POVM invariants and report diagnostics.
    Validate {
        /// POVM document to check.
        povm: String,
    },
    /// Convert a POVM to one of its dual representations.
    Convert {
        povm: String,
        #[arg(long, value_enum)]
        to: ConvertTarget,
        /// Density-matrix documents to push through a statistical map.
        #[arg(long)]
        state: Vec<String>,
        /// Measure document; defaults to the POVM file's measure block.
        #[arg(long)]
        measure: Option<String>,
    },
    /// Sequentially compose a first-stage POVM with an indexed family.
    Compose {
        first: String,
        measure: String,
        family: String,
        /// Where to write the composite POVM document.
        #[arg(long)]
        out: String,
        /// Compute per-atom blocks in parallel (same output bit for bit).
        #[arg(long)]
        parallel: bool,
    },
    /// Total variation of a POVM.
    Variation {
        povm: String,
        #[arg(long, value_enum, default_value = "both")]
        mode: VariationChoice,
    },
    /// Run the effect-algebra and effect-module law suites on the shipped
    /// instances.
    Axioms {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Reproduce the spin-1/2 experiment and check its two exact claims.
    SpinDemo {
        #[arg(long, default_value_t = 2000)]
        points: usize,
        #[arg(long, value_enum, default_value = "octahedral-symmetrized")]
        scheme: SchemeChoice,
        /// Region: north, south, x+/x-/y+/y-/z+/z-, or indices:i,j,k.
        #[arg(long, default_value = "north")]
        region: String,
        #[arg(long)]
        parallel: bool,
    },
    /// Parse, reserialize, and reparse a document, checking the values
    /// survive to the last printed digit.
    Roundtrip {
        file: String,
        #[arg(long, value_enum)]
        kind: commands::DocKind,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = povmlab_core::Tolerances::uniform(cli.tolerance.unwrap_or(1e-9));
    let outcome = match cli.command {
        Command::Validate { povm } => commands::validate(&povm, tol),
        Command::Convert {
            povm,
            to,
            state,
            measure,
        } => commands::convert(&povm, to, &state, measure.as_deref(), tol),
        Command::Compose {
            first,
            measure,
            family,
            out,
            parallel,
        } => commands::compose(&first, &measure, &family, &out, parallel, tol),
        Command::Variation { povm, mode } => commands::variation(&povm, mode, tol),
        Command::Axioms { samples, seed } => commands::axioms(samples, seed, tol),
        Command::SpinDemo {
            points,
            scheme,
            region,
            parallel,
        } => commands::spin_demo(points, scheme, &region, parallel),
        Command::Roundtrip { file, kind } => commands::roundtrip(&file, kind),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
