use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dynmo_core::problems::PROBLEM_NAMES;
use dynmo_core::scenario::{run_scenario, Mode, Scenario, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "dynmo", version, about = "Dynamic multi-objective benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its CSV artifacts.
    Run {
        scenario: PathBuf,
        /// Output directory; overrides the scenario and the environment.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<CliMode>,
    },
    /// Print the available problem names.
    ListProblems,
    /// Parse and validate a scenario file, printing its resolved form.
    Validate { scenario: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Analyze,
    Optimize,
    Both,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Self {
        match m {
            CliMode::Analyze => Mode::Analyze,
            CliMode::Optimize => Mode::Optimize,
            CliMode::Both => Mode::Both,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> Result<(), String> {
    match command {
        Command::ListProblems => {
            for name in PROBLEM_NAMES {
                println!("{name}");
            }
            Ok(())
        }
        Command::Validate { scenario } => {
            let s = Scenario::from_file(&scenario).map_err(|e| format!("{}: {e}", scenario.display()))?;
            print!("{}", s.to_text());
            Ok(())
        }
        Command::Run { scenario, out, mode } => {
            let mut s = Scenario::from_file(&scenario).map_err(|e| format!("{}: {e}", scenario.display()))?;
            if let Some(mode) = mode {
                s.mode = mode.into();
            }
            let out = out.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from));
            let summary = run_scenario(&s, out.as_deref()).map_err(|e| e.to_string())?;
            let mut line = format!(
                "{}: {}, {}",
                s.problem.name(),
                summary.order.kind,
                summary.order.correlation
            );
            if let Some(ty) = summary.change_type {
                line.push_str(&format!(", {ty}"));
            }
            if let Some(igd) = summary.final_igd {
                line.push_str(&format!(", final igd {igd}"));
            }
            println!("{line}");
            println!("wrote {}", summary.out_dir.display());
            Ok(())
        }
    }
}
