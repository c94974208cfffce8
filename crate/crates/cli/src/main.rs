//! Command-line front end for the divergence toolkit.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Outcome};
use report::Format;

const AFTER_HELP: &str = "\
Output formats:
  table  aligned `field value` lines grouped into [inputs] and [results]
  json   {\"command\", \"formula\", \"inputs\", \"results\"}; non-finite numbers are \"inf\", \"-inf\", \"nan\"
  csv    columns section,field,value; section is meta, inputs or results and nested
         fields are dotted paths such as results.rows.3.skew_k

Files:
  distribution  {\"support\": [...], \"mass\": [...]} or a bare array of masses on 0..n
  channel       {\"rows\": [[...], ...]} or a bare row-stochastic matrix

Exit status: 0 success, 1 invalid input or usage, 2 numerical failure or failed check.";

#[derive(Debug, Parser)]
#[command(name = "divrel", version, about = "Relations between relative entropy, chi-squared and other f-divergences", after_help = AFTER_HELP)]
struct Cli {
    #[arg(long, value_enum, default_value = "table", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one divergence between two distribution files
    Divergence(commands::DivergenceArgs),
    /// Compare a divergence with its integral representation
    IdentityCheck(commands::IdentityArgs),
    /// Tight lower bound on relative entropy from means and variances
    MomentBound(commands::MomentArgs),
    /// Sweep the inequality checks over seeded random pairs
    Inequalities(commands::InequalityArgs),
    /// Contraction coefficients of a source-channel pair
    Contraction(commands::ContractionArgs),
    /// Skew-divergence trajectories of a reversible Markov chain
    Mixing(commands::MixingArgs),
    /// Redundancy bounds for a Shannon code matched to a Poisson mixture
    Redundancy(commands::RedundancyArgs),
    /// Minimal sample size from the method-of-types bound
    SampleSize(commands::SampleSizeArgs),
    /// f-divergence between a measure and its restriction to a set
    SetDivergence(commands::SetDivergenceArgs),
}

fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Divergence(a) => commands::divergence(a),
        Command::IdentityCheck(a) => commands::identity_check(a),
        Command::MomentBound(a) => commands::moment_bound(a),
        Command::Inequalities(a) => commands::inequalities(a),
        Command::Contraction(a) => commands::contraction(a),
        Command::Mixing(a) => commands::mixing(a),
        Command::Redundancy(a) => commands::redundancy(a),
        Command::SampleSize(a) => commands::sample_size(a),
        Command::SetDivergence(a) => commands::set_divergence(a),
    }
}

fn fail(err: CliError) -> ExitCode {
    match err {
        CliError::Validation(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        CliError::Numerical(msg) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(&cli.command) {
        Ok((report, failure)) => {
            print!("{}", report.render(cli.format));
            failure.map_or(ExitCode::SUCCESS, fail)
        }
        Err(err) => fail(err),
    }
}
