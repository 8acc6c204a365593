//! `gkcs`: inspect spectra, evaluate coherent states, dump operators, write
//! sweep tables and run the criteria suite.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{OpArgs, RunConfig, StateArgs, SweepArgs, Task, VerifyArgs};

#[derive(Parser)]
#[command(name = "gkcs", version, about = "GK coherent states on a truncated Fock space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum catalog and moment tables
    Spectra {
        #[command(subcommand)]
        command: SpectraCommand,
    },
    /// Coherent-state amplitudes
    State {
        #[command(subcommand)]
        command: StateCommand,
    },
    /// Operator matrices
    Op {
        #[command(subcommand)]
        command: OpCommand,
    },
    /// Plot-ready tables over a parameter grid
    Sweep(SweepArgs),
    /// Criteria checks
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
    /// Re-run the configuration embedded in an output file
    Rerun {
        /// CSV or JSON file written by this tool
        artifact: PathBuf,
        /// Where to write; defaults to standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SpectraCommand {
    /// List catalog models, or tabulate one model with --model
    List {
        /// Model spec, e.g. `poschl_teller:nu=3`
        #[arg(long)]
        model: Option<String>,
        /// Index range `a..b` (inclusive)
        #[arg(long, default_value = "0..10")]
        n: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum StateCommand {
    /// Amplitudes, probabilities and normalization of one state
    Eval(StateArgs),
}

#[derive(Subcommand)]
enum OpCommand {
    /// Dense matrix of one operator
    Dump(OpArgs),
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Run every applicable check; exit status 0 iff all pass
    Suite(VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let task = match cli.command {
        Command::Spectra { command: SpectraCommand::List { model, n, json } } => {
            print!("{}", commands::spectra_list(model.as_deref(), &n, json)?);
            return Ok(ExitCode::SUCCESS);
        }
        Command::State { command: StateCommand::Eval(a) } => Task::State(a),
        Command::Op { command: OpCommand::Dump(a) } => Task::Op(a),
        Command::Sweep(a) => Task::Sweep(a),
        Command::Verify { command: VerifyCommand::Suite(a) } => Task::Verify(a),
        Command::Rerun { artifact, out } => {
            let mut cfg = config::read_embedded(&artifact)?;
            cfg.set_out(out);
            return commands::execute(&cfg);
        }
    };
    commands::execute(&RunConfig::new(task))
}
