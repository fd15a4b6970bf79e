use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nql_cli::{cmd_fit, cmd_plot, cmd_rank, cmd_report, Axes, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "nql", version, about = "Nonlinear quality-of-life index from an elastic principal curve")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model and write it to the configured output directory
    Fit {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the ranking TSV for a dataset
    Rank {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Compare the linear and nonlinear indices
    Report {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Draw the data and the curve in a principal-component plane
    Plot {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "1,2")]
        axes: Axes,
        #[arg(long)]
        out: PathBuf,
    },
}

fn emit(text: &str) -> Result<(), CliError> {
    std::io::stdout()
        .lock()
        .write_all(text.as_bytes())
        .map_err(|source| CliError::UnwritablePath {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fit { config } => emit(&cmd_fit(&RunConfig::load(&config)?)?.to_string()),
        Command::Rank { model, data } => emit(&cmd_rank(&model, &data)?),
        Command::Report { model, data } => emit(&cmd_report(&model, &data)?),
        Command::Plot { model, data, axes, out } => cmd_plot(&model, &data, axes, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nql: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
