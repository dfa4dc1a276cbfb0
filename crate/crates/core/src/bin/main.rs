use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ofdma_alloc::harness::{emit_results, run_scenario, write_results, Overrides, ScenarioConfig};
use ofdma_alloc::metrics::PowerMode;
use ofdma_alloc::solvers::Algorithm;
use ofdma_alloc::verify::{self, VerifyOptions};

#[derive(Parser)]
#[command(name = "ofdma-alloc", version, about = "Multi-cell OFDMA load-minimizing allocation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo scenario and write the summary CSV.
    Run {
        /// TOML scenario file; built-in defaults when omitted.
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        drops: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        algorithm: Option<Vec<Algorithm>>,
        /// Users per cell, comma separated.
        #[arg(long, value_delimiter = ',')]
        users: Option<Vec<usize>>,
        #[arg(long)]
        max_prbs: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        power_mode: Option<Vec<PowerMode>>,
        /// IPP depths, comma separated.
        #[arg(long, value_delimiter = ',')]
        ipp: Option<Vec<usize>>,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the effective configuration and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Run the built-in correctness checks.
    Verify {
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long, default_value_t = 10)]
        drops: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> ofdma_alloc::Result<bool> {
    match command {
        Command::Run { config, seed, drops, algorithm, users, max_prbs, power_mode, ipp, out, print_config } => {
            let mut cfg = match &config {
                Some(path) => ScenarioConfig::from_file(path)?,
                None => ScenarioConfig::default(),
            };
            cfg.apply(&Overrides { seed, drops, algorithm, users, max_prbs, power_mode, ipp });
            cfg.validate()?;
            if print_config {
                print!("{}", cfg.to_toml_string());
                return Ok(true);
            }
            let rows = run_scenario(&cfg)?;
            match out {
                Some(path) => emit_results(&rows, &path)?,
                None => write_results(&rows, std::io::stdout().lock())?,
            }
            Ok(true)
        }
        Command::Verify { instances, drops, seed } => {
            let options = VerifyOptions { instances, feasibility_drops: drops, seed, ..VerifyOptions::default() };
            let report = verify::run(&options)?;
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(report.passed())
        }
    }
}
