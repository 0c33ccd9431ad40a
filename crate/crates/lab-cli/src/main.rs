//! cvxlab: run metrics on function specs, convergence experiments across
//! metrics, isometry verifications and conjugation, with machine-readable
//! reports.
//!
//! Exit codes: 0 success, 1 input error, 2 admissibility or membership
//! refusal, 3 internal tolerance failure.

mod cli;
mod cmd_conjugate;
mod cmd_converge;
mod cmd_isometry;
mod cmd_metric;
mod output;

use clap::Parser;
use epimetrics::Error;

fn main() {
    let args = cli::Cli::parse();
    let code = match run(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    };
    std::process::exit(code);
}

fn run(args: cli::Cli) -> Result<i32, Error> {
    match args.command {
        cli::Command::Metric(a) => cmd_metric::run(a),
        cli::Command::Converge(a) => cmd_converge::run(a),
        cli::Command::Isometry(a) => cmd_isometry::run(a),
        cli::Command::Conjugate(a) => cmd_conjugate::run(a),
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NotFullDimensional(_)
        | Error::MembershipUnverified(_)
        | Error::NotInPhi(_)
        | Error::NotCoercive(_)
        | Error::WeightRange { .. } => 2,
        Error::Tolerance(_) => 3,
        _ => 1,
    }
}
