mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Report;

#[derive(Parser)]
#[command(name = "dlevo", version, about = "Evolve DL-Lite knowledge bases")]
struct Cli {
    /// Print a JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a KB file.
    Validate { file: PathBuf },
    /// Print the closure of the ABox.
    Closure { file: PathBuf },
    /// Check satisfiability and list violation sets.
    Sat { file: PathBuf },
    /// Insert the facts of FACTS into the KB.
    Insert {
        file: PathBuf,
        #[arg(long)]
        facts: PathBuf,
        /// Use the exhaustive reference implementation.
        #[arg(long)]
        oracle: bool,
        /// Atom limit for --oracle.
        #[arg(long, default_value_t = dlevo_core::oracle::DEFAULT_BOUND)]
        bound: usize,
    },
    /// Delete the facts of FACTS from the KB.
    Delete {
        file: PathBuf,
        #[arg(long)]
        facts: PathBuf,
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = dlevo_core::oracle::DEFAULT_BOUND)]
        bound: usize,
    },
    /// Apply a changelog and write the final KB to OUT.
    Apply {
        file: PathBuf,
        #[arg(long)]
        changelog: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Report {
    match cli.command {
        Command::Validate { file } => commands::validate(&file),
        Command::Closure { file } => commands::closure(&file),
        Command::Sat { file } => commands::sat(&file),
        Command::Insert {
            file,
            facts,
            oracle,
            bound,
        } => commands::evolve(&file, &facts, commands::Op::Insert, oracle.then_some(bound)),
        Command::Delete {
            file,
            facts,
            oracle,
            bound,
        } => commands::evolve(&file, &facts, commands::Op::Delete, oracle.then_some(bound)),
        Command::Apply {
            file,
            changelog,
            out,
        } => commands::apply(&file, &changelog, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let report = run(cli);
    if json {
        println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
    } else {
        print!("{}", report.text);
        for d in &report.diagnostics {
            eprintln!("dlevo: {d}");
        }
    }
    ExitCode::from(report.status.exit_code())
}
