mod commands;
mod config;
mod failure;
mod histogram;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Command, RunConfig};
use failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "minifunc", version, about = "Estimate additive functionals of discrete distributions")]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, env = "MINIFUNC_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads for Monte Carlo runs; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Allow estimator constants that fail validation.
    #[arg(long, global = true)]
    allow_unvalidated: bool,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: TopCommand,
}

#[derive(Debug, Subcommand)]
enum TopCommand {
    #[command(flatten)]
    Job(Command),
    /// Replay a configuration saved with `--print-config` or taken from a
    /// report's `config` field.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn resolve(cli: Cli) -> Result<RunConfig, Failure> {
    match cli.command {
        TopCommand::Job(mut command) => {
            if let Command::RiskSweep(a) = &mut command {
                a.phi = Some(a.functional());
                a.alpha = None;
            }
            Ok(RunConfig { master_seed: cli.seed, allow_unvalidated: cli.allow_unvalidated, command })
        }
        TopCommand::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Failure::input(format!("{}: {e}", config.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", config.display())))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs;
    let print_config = cli.print_config;
    let result = resolve(cli).and_then(|cfg| {
        if print_config {
            return Ok(serde_json::to_value(&cfg)?);
        }
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(j) = jobs {
            pool = pool.num_threads(j.max(1));
        }
        let pool = pool.build().map_err(|e| Failure::numerical(e.to_string()))?;
        pool.install(|| commands::run(&cfg))
    });
    match result {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            let text = serde_json::to_string_pretty(&report).expect("JSON values always serialize");
            if writeln!(stdout, "{text}").is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
