//! Command-line front end: load a JSON config, run the checks or the solver,
//! and emit human-readable or machine-readable reports.
//!
//! Exit codes: 0 - every check passed; 1 - a mathematical check failed or was
//! inconclusive; 2 - usage or configuration error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use shiftfix_core::{Config, Error};

#[derive(Parser)]
#[command(
    name = "shiftfix",
    version,
    about = "Fixed-point solver and hypothesis checker for shifting-distance pairs"
)]
struct Cli {
    /// JSON config file declaring the space, map, pair and check parameters.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Emit a single JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Override the config's check seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check shifting-pair conditions (i) and (ii) for the configured pair.
    CheckPair,
    /// Verify psi(d(Tx,Ty)) <= phi(d(x,y)) by sampling, then search for
    /// counterexamples.
    CheckContraction,
    /// Run Picard iteration x_{n+1} = T x_n from x0.
    Solve {
        /// Start point (number or rational like "3/125"); overrides the config.
        #[arg(long, value_name = "X0")]
        x0: Option<String>,
        /// Fixed-point residual tolerance; overrides the config.
        #[arg(long, value_name = "TOL")]
        tol: Option<f64>,
        /// Iteration budget; overrides the config.
        #[arg(long, value_name = "N")]
        max_iter: Option<usize>,
        /// Write the iteration trace as CSV to this path.
        #[arg(long, value_name = "PATH")]
        trace_out: Option<PathBuf>,
    },
    /// Run Picard from several sampled starts and compare the limits.
    ProbeUniqueness {
        /// Number of starts; overrides the config.
        #[arg(long, value_name = "N")]
        starts: Option<usize>,
    },
    /// Built-in instances: list them or run one end to end.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Print the registered instance names.
    List,
    /// Run the full pipeline for one instance and compare expectations.
    Run { name: String },
}

/// Map an error to the exit-code class: declaration/usage problems are 2,
/// failures of a declared object's mathematics are 1.
fn classify(err: &Error) -> u8 {
    match err {
        Error::Syntax { .. }
        | Error::UnknownIdentifier { .. }
        | Error::NegativeInput(_)
        | Error::Partition(_)
        | Error::InvalidBounds { .. }
        | Error::NotAMember { .. }
        | Error::MapNotTotal(_)
        | Error::Param(_)
        | Error::Grid(_)
        | Error::Window { .. }
        | Error::UnknownInstance(_)
        | Error::Config(_) => 2,
        Error::LnDomain { .. }
        | Error::DivisionByZero { .. }
        | Error::ClosureViolation { .. }
        | Error::NotAltering { .. } => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let mut config = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(config) => config,
            Err(err) => return fail(&cli, &err),
        },
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        config.checks.seed = seed;
    }
    // Echo resolved defaults in every report.
    config.checks.u_max = Some(config.checks.effective_u_max());

    let outcome = match &cli.command {
        Command::CheckPair => commands::check_pair(&config, cli.json),
        Command::CheckContraction => commands::check_contraction(&config, cli.json),
        Command::Solve {
            x0,
            tol,
            max_iter,
            trace_out,
        } => commands::solve(
            &config,
            cli.json,
            x0.as_deref(),
            *tol,
            *max_iter,
            trace_out.as_deref(),
        ),
        Command::ProbeUniqueness { starts } => {
            commands::probe_uniqueness(&config, cli.json, *starts)
        }
        Command::Corpus { action } => match action {
            CorpusAction::List => commands::corpus_list(cli.json),
            CorpusAction::Run { name } => commands::corpus_run(&config, cli.json, name),
        },
    };

    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => fail(&cli, &err),
    }
}

fn fail(cli: &Cli, err: &Error) -> ExitCode {
    if cli.json {
        let doc = serde_json::json!({
            "schema_version": output::SCHEMA_VERSION,
            "error": err.to_string(),
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    }
    eprintln!("error: {err}");
    ExitCode::from(classify(err))
}
