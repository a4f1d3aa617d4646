use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use vfunc_cli::{cmd_counterexample, cmd_filtration, cmd_sweep, cmd_v, v_csv, CliError, JobSpec};

#[derive(Parser)]
#[command(name = "vfunc", version, about = "Exact v-function and ramification filtrations for (Z/p)² in SL₂")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate v by the closed formula and by the tuning-module oracle.
    V {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Upper and lower ramification filtrations of one extension.
    Filtration {
        #[arg(long)]
        input: PathBuf,
    },
    /// Sweep c over F_q minus F_p in the constant-filtration family.
    Counterexample {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        modulus: Option<String>,
    },
    /// Seeded random comparison of both routes, CSV on stdout.
    Sweep {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        modulus: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_degree: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialise")
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::V { input, format } => {
            let spec = JobSpec::from_file(&input)?;
            let check = cmd_v(&spec)?;
            match format {
                Format::Json => println!("{}", json(&check)),
                Format::Csv => print!("{}", v_csv(&spec, &check)?),
            }
            if !check.agree {
                return Err(CliError::Disagreement(format!(
                    "formula {} vs oracle {}",
                    check.formula.value, check.oracle.value
                )));
            }
        }
        Command::Filtration { input } => {
            println!("{}", json(&cmd_filtration(&JobSpec::from_file(&input)?)?));
        }
        Command::Counterexample { p, n, modulus } => {
            let report = cmd_counterexample(p, n, modulus.as_deref())?;
            println!("{}", json(&report));
            if !report.all_agree {
                return Err(CliError::Disagreement("some c gave different values".into()));
            }
        }
        Command::Sweep { p, n, modulus, max_degree, seed, count } => {
            let (csv, all_agree) = cmd_sweep(p, n, modulus.as_deref(), max_degree, seed, count)?;
            print!("{csv}");
            if !all_agree {
                return Err(CliError::Disagreement("see rows with agree=false".into()));
            }
        }
    }
    Ok(())
}

fn error_name(e: &CliError) -> &str {
    match e {
        CliError::Parse(_) => "Parse",
        CliError::Validation { name, .. } => name,
        CliError::Disagreement(_) => "Disagreement",
        CliError::Internal(_) => "Internal",
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", error_name(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
