use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use toric_periods::harness::{catalog_entry, parse_scenario, run_scenario, CATALOG};

/// Exact verifier for periods of graded toric dual pairs over F_q(t).
#[derive(Parser)]
#[command(name = "toric-periods", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a scenario file and write its report.
    Verify {
        file: PathBuf,
        /// Print the full JSON report instead of the summary.
        #[arg(long)]
        json: bool,
        /// Worker threads for Euler factors.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Report path; defaults to `<file stem>.report.json` beside the input,
        /// or in `$TORIC_PERIODS_OUT_DIR` when set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in scenarios.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Emit {
        name: String,
        #[arg(long)]
        q: Option<u64>,
        /// Truncation order U.
        #[arg(long)]
        order: Option<i64>,
        /// Weight for `weight_n_stack`.
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_report_path(input: &Path) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    let name = format!("{stem}.report.json");
    match std::env::var_os("TORIC_PERIODS_OUT_DIR") {
        Some(dir) => PathBuf::from(dir).join(name),
        None => input.with_file_name(name),
    }
}

fn verify(file: &Path, json: bool, jobs: usize, out: Option<PathBuf>) -> anyhow::Result<ExitCode> {
    let text =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let scenario = match parse_scenario(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("schema error in {}: {e}", file.display());
            return Ok(ExitCode::from(2));
        }
    };
    let report = match run_scenario(&scenario, jobs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("schema error in {}: {e}", file.display());
            return Ok(ExitCode::from(2));
        }
    };
    let body = report.to_json();
    let path = out.unwrap_or_else(|| default_report_path(file));
    std::fs::write(&path, format!("{body}\n"))
        .with_context(|| format!("writing {}", path.display()))?;
    if json {
        println!("{body}");
    } else {
        print!("{}", report.summary());
        println!("report written to {}", path.display());
    }
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            file,
            json,
            jobs,
            out,
        } => verify(&file, json, jobs, out),
        Command::Catalog {
            action: CatalogAction::List,
        } => {
            for name in CATALOG {
                println!("{name}");
            }
            println!("weight_n_stack (with --n)");
            Ok(ExitCode::SUCCESS)
        }
        Command::Catalog {
            action:
                CatalogAction::Emit {
                    name,
                    q,
                    order,
                    n,
                    out,
                },
        } => {
            let s = match catalog_entry(&name, q, order, n) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(ExitCode::from(2));
                }
            };
            let body = serde_json::to_string_pretty(&s)?;
            match out {
                Some(p) => std::fs::write(&p, format!("{body}\n"))
                    .with_context(|| format!("writing {}", p.display()))?,
                None => println!("{body}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
