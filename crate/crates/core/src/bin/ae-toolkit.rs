use std::path::PathBuf;
use std::process::ExitCode;

use ae_toolkit::cli::{describe, run_suite, Catalog, Status, Suite, SuiteConfig};
use ae_toolkit::Error;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ae-toolkit", version, about = "Verification suites for analytic extensions of Muckenhoupt weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named suite and write report.json plus CSV tables.
    Run {
        #[arg(long, value_parser = |s: &str| s.parse::<Suite>().map_err(|e| e.to_string()))]
        suite: Suite,
        /// Directory with weights.json, functions.json, boundaries/ and tolerances.json; missing files use the built-in catalog.
        #[arg(long)]
        inputs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override of the Smirnov defect tolerance.
        #[arg(long)]
        tol_smirnov: Option<f64>,
        /// Seed for the sampled affine family members.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List catalog entries with their closed-form oracles.
    Describe {
        /// Inputs directory to describe instead of the built-in catalog.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Describe { catalog } => {
            let cat = match catalog {
                Some(dir) => Catalog::load(&dir, false)?,
                None => Catalog::default(),
            };
            print!("{}", describe(&cat));
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { suite, inputs, out, tol_smirnov, seed } => {
            let mut tolerances = Catalog::load_tolerances(&inputs)?;
            if let Some(t) = tol_smirnov {
                tolerances.smirnov = t;
            }
            let report = run_suite(&SuiteConfig { suite, inputs, output_dir: out.clone(), tolerances, seed })?;
            for c in &report.checks {
                println!("{:<13} {}  {}", c.status.as_str(), c.name, c.verdict);
            }
            for c in report.checks.iter().filter(|c| c.status >= Status::Fail) {
                eprintln!("{}: {} ({})", c.status.as_str(), c.name, c.verdict);
            }
            if report.checks.iter().any(|c| c.status == Status::Contradiction) {
                eprintln!("witness dump in {}", out.join("report.json").display());
            }
            Ok(ExitCode::from(report.exit_code() as u8))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
