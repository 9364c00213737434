mod compare;
mod run;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mirrorsim::netlist::parse_value;
use mirrorsim::Execution;

/// SPICE-subset simulator for BJT current mirrors and memristor circuits.
#[derive(Debug, Parser)]
#[command(name = "mirrorsim", version)]
struct Cli {
    /// Solve independent sweep chunks and compared circuits on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every analysis in a netlist and write the results.
    Run {
        file: PathBuf,
        /// Output directory (created if missing).
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
        /// Transient step, overriding the `.tran` directive (e.g. `0.5u`).
        #[arg(long, value_parser = spice_value)]
        tstep: Option<f64>,
        /// Newton relative tolerance.
        #[arg(long, value_parser = spice_value)]
        reltol: Option<f64>,
        /// Output kinds to write.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "csv,text")]
        format: Vec<Format>,
    },
    /// Run two netlists and compare one metric side by side.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum)]
        metric: Metric,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Thd,
    Power,
}

fn spice_value(s: &str) -> Result<f64, String> {
    parse_value(s).map_err(|e| e.to_string())
}

/// Failure classes, mapped to the process exit status.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable netlist or bad arguments: exit 1.
    Parse(String),
    /// Solver failure or a metric whose directives are missing: exit 2.
    Analysis(String),
    /// Input or output file trouble: exit 3.
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 1,
            Failure::Analysis(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Analysis(m) | Failure::Io(m) => m,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let outcome = match cli.command {
        Command::Run {
            file,
            out,
            tstep,
            reltol,
            format,
        } => run::run(&run::RunArgs {
            file,
            out,
            tstep,
            reltol,
            formats: format,
            exec,
        }),
        Command::Compare { a, b, metric } => compare::compare(&a, &b, metric, exec).map(|table| print!("{table}")),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}
