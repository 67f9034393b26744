//! Command-line front end: tropical utilities, network compilation,
//! training, evaluation, rendering and experiment runs.

mod compile;
mod error;
mod io;
mod run;
mod trop;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use error::{CliError, CliResult, Code};

#[derive(Debug, Parser, Serialize)]
#[command(name = "tropinit", version, about = "Compile geometric regions into sigmoidal classifiers")]
struct Cli {
    /// Print the parsed arguments as JSON and exit without doing any work.
    #[arg(long, global = true)]
    #[serde(skip)]
    print_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Max-plus polynomials: evaluation, curves and dual subdivisions.
    #[command(subcommand)]
    Trop(trop::TropCommand),
    /// Compile a region description into network weights.
    #[command(subcommand)]
    Compile(compile::CompileCommand),
    /// Train a network with Adam on binary cross-entropy.
    Train(run::TrainArgs),
    /// Evaluate a network on a point set.
    Eval(run::EvalArgs),
    /// Render a decision map and its 0.5 contour.
    Render(run::RenderArgs),
    /// Run the disk or swiss-roll experiment.
    Experiment(run::ExperimentArgs),
}

impl Command {
    fn execute(&self) -> CliResult<()> {
        match self {
            Command::Trop(c) => c.execute(),
            Command::Compile(c) => c.execute(),
            Command::Train(a) => a.execute(),
            Command::Eval(a) => a.execute(),
            Command::Render(a) => a.execute(),
            Command::Experiment(a) => a.execute(),
        }
    }

    fn resolved(&self) -> CliResult<serde_json::Value> {
        match self {
            Command::Experiment(a) => Ok(serde_json::json!({ "command": self, "experiment": a.resolve()? })),
            _ => Ok(serde_json::json!({ "command": self })),
        }
    }
}

fn flag_error(e: &clap::Error) -> CliError {
    let text = e.to_string();
    let first = text.lines().next().unwrap_or("invalid arguments");
    CliError::new(Code::Flag, first.trim_start_matches("error: ").trim())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(std::io::stdout(), "{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            eprint!("{e}");
            let err = CliError::new(Code::Flag, "missing subcommand");
            eprintln!("{err}");
            return err.code.exit();
        }
        Err(e) => {
            let err = flag_error(&e);
            eprintln!("{err}");
            return err.code.exit();
        }
    };
    let result = if cli.print_config {
        cli.command.resolved().and_then(|v| io::emit(None, io::versioned_json(&v).as_bytes()))
    } else {
        cli.command.execute()
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            err.code.exit()
        }
    }
}
