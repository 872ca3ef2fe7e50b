use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use entangle_cli::kinds::{kinds_json, kinds_table};
use entangle_cli::output::write_outputs;
use entangle_cli::{run_experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "entangle", version, about = "Run entangled ergodic averaging experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and write report.csv and summary.md.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Size of the worker pool (defaults to the number of cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the experiment kinds.
    List {
        #[arg(long)]
        json: bool,
    },
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List { json } => {
            if json {
                println!("{}", kinds_json());
            } else {
                print!("{}", kinds_table());
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, out, seed, threads } => run(config, out, seed, threads),
    }
}

fn run(path: PathBuf, out: PathBuf, seed: Option<u64>, threads: Option<usize>) -> ExitCode {
    if let Some(n) = threads {
        if n == 0 {
            eprintln!("error: --threads: must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let mut config = match ExperimentConfig::from_path(&path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error in {}: {e}", path.display());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Some(s) = seed {
        config.seed = s;
    }
    let start = Instant::now();
    let outcome = match run_experiment(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("config error in {}: {e}", path.display());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Err(e) = write_outputs(&out, &outcome, &config, start.elapsed()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    for check in &outcome.checks {
        let mark = if check.passed { "PASS" } else { "FAIL" };
        println!("{mark} {}: {}", check.name, check.detail);
    }
    if outcome.passed() {
        println!("{}: PASS (max deviation {:.3e})", outcome.kind, outcome.report.max_deviation());
        ExitCode::SUCCESS
    } else {
        println!("{}: FAIL (max deviation {:.3e})", outcome.kind, outcome.report.max_deviation());
        ExitCode::from(EXIT_FAIL)
    }
}
