//! `aitlab`: batch driver for the monotone-machine, algorithmic-probability,
//! induction, mixture and Bell experiments.
//!
//! Exit codes: 0 on success, 2 for bad input, 3 when the request is
//! mathematically ill-posed (for example conditioning on impossible
//! evidence). Worker threads follow `RAYON_NUM_THREADS`.

mod bell;
mod demo;
mod error;
mod induction;
mod inputs;
mod machines;
mod mixture;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::error::CliError;
use crate::output::{Format, Report};

#[derive(Parser, Debug)]
#[command(
    name = "aitlab",
    version,
    about = "Exact experiments with monotone machines, universal priors and Bell tables"
)]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a machine on an input under a step budget.
    Run(machines::RunArgs),
    /// Lower bounds on M(x) and upper bounds on Km(x).
    Estimate(machines::EstimateArgs),
    /// The Solomonoff-normalized measure from one set of estimates.
    Normalize(machines::NormalizeArgs),
    /// Compare a transported machine's estimates with the original's.
    Transport(machines::TransportArgs),
    /// Print a machine in the JSON file format.
    ShowMachine(machines::ShowMachineArgs),
    /// Persistence curve of a computable test under a predictor.
    Persist(induction::PersistArgs),
    /// Check that every passing string has a passing extension.
    Sustain(induction::SustainArgs),
    /// Finite Bayesian mixtures.
    #[command(subcommand)]
    Mixture(mixture::MixtureCommand),
    /// Bell correlations and detection postselection.
    #[command(subcommand)]
    Bell(bell::BellCommand),
    /// The worked examples of one module.
    DemoPaper {
        #[arg(value_enum)]
        module: demo::Module,
    },
}

fn dispatch(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Run(a) => machines::run_cmd(a),
        Command::Estimate(a) => machines::estimate_cmd(a),
        Command::Normalize(a) => machines::normalize_cmd(a),
        Command::Transport(a) => machines::transport_cmd(a),
        Command::ShowMachine(a) => machines::show_machine_cmd(a),
        Command::Persist(a) => induction::persist_cmd(a),
        Command::Sustain(a) => induction::sustain_cmd(a),
        Command::Mixture(c) => mixture::mixture_cmd(c),
        Command::Bell(c) => bell::bell_cmd(c),
        Command::DemoPaper { module } => demo::demo(*module),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // clap spreads its message over several lines followed by usage
            // hints; keep only the message, on one line.
            let msg = e.to_string();
            let parts: Vec<&str> = msg
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .filter(|l| !l.is_empty())
                .collect();
            eprintln!("aitlab: {}", parts.join(" ").trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    let result = dispatch(&cli.command)
        .and_then(|report| report.render(cli.format))
        .and_then(|text| output::emit(&text, cli.out.as_deref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("aitlab: {}", e.diagnostic());
            ExitCode::from(e.exit_code())
        }
    }
}
