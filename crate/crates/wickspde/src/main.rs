use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wickspde::config::ExperimentConfig;
use wickspde::runner::{self, ExitStatus, RunError};
use wickspde::stats;
use wickspde_core::grid::GridSpec;
use wickspde_core::multiindex::IndexSet;

#[derive(Parser)]
#[command(name = "wickspde", version, about = "Wick-quantized SPDE experiments on a truncated Wiener chaos")]
struct Cli {
    /// Worker threads (overrides WICKSPDE_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve, export and check one configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed (overrides seed).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse and validate a configuration without solving.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check an exported solution file against the configured oracle panel.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Print a truncation set: its header, then one multi-index per line.
    Basis {
        #[arg(short = 'K', long = "degree")]
        k: u32,
        #[arg(short = 'N', long = "dims")]
        n: usize,
    },
    /// Dump the Hermite functions on a periodic grid as CSV.
    Table {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
        #[arg(long, default_value_t = 20.0)]
        length: f64,
    },
}

fn threads(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| std::env::var("WICKSPDE_THREADS").ok()?.trim().parse().ok())
        .filter(|&n| n > 0)
}

fn load(path: &Path) -> Result<ExperimentConfig, RunError> {
    let cfg = ExperimentConfig::from_file(path)?;
    for w in cfg.validate()? {
        eprintln!("warning: {}", w.0);
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<ExitStatus, RunError> {
    match cli.command {
        Command::Run { config, out, seed } => {
            let mut cfg = load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let dir = out.unwrap_or_else(|| cfg.output.clone());
            let outcome = runner::run(&cfg, &dir)?;
            for r in &outcome.reports {
                println!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.csv_row());
            }
            if let Some(reason) = &outcome.aborted {
                eprintln!("aborted: {reason}");
            }
            println!("wrote {} files to {}", outcome.files.len(), dir.display());
            Ok(outcome.status)
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!("OK");
            print!("{}", cfg.echo());
            Ok(ExitStatus::Success)
        }
        Command::Oracle { config, solution } => {
            let cfg = load(&config)?;
            let reports = runner::oracle_on_file(&cfg, &solution)?;
            println!("{}", wickspde_core::oracle::OracleReport::CSV_HEADER);
            for r in &reports {
                println!("{}", r.csv_row());
            }
            Ok(if reports.iter().all(|r| r.pass) { ExitStatus::Success } else { ExitStatus::OracleFailure })
        }
        Command::Basis { k, n } => {
            print!("{}", IndexSet::enumerate(k, n).serialize());
            Ok(ExitStatus::Success)
        }
        Command::Table { count, nodes, length } => {
            let grid = GridSpec::line(nodes, length)?;
            print!("{}", stats::hermite_table_csv(&grid, count));
            Ok(ExitStatus::Success)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = threads(cli.threads) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(ExitStatus::Validation as u8);
        }
    }
    match execute(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_status() as u8)
        }
    }
}
