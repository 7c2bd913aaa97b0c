use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use scaleqm_cli::config::{self, Scenario};
use scaleqm_cli::report::{write_report, CheckReport};
use scaleqm_cli::scenarios::{run_scenario, RunContext};

/// Scenario runner for the number-scaling quantum mechanics library.
#[derive(Parser)]
#[command(name = "scaleqm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a config file and write reports.
    Run {
        /// Path to the TOML scenario config.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: $SCALEQM_OUT or ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's scenario name.
        #[arg(long)]
        scenario: Option<String>,
    },
    /// List the scenario names accepted in configs and --scenario.
    ListScenarios,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{}", s.name());
            }
            ExitCode::SUCCESS
        }
        Command::Run { config: config_path, out, seed, scenario } => {
            run(config_path, out, seed, scenario)
        }
    }
}

fn run(
    config_path: PathBuf,
    out: Option<PathBuf>,
    seed: Option<u64>,
    scenario: Option<String>,
) -> ExitCode {
    let mut cfg = match config::load_config(&config_path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(name) = scenario {
        match Scenario::from_name(&name) {
            Some(s) => cfg.scenario = s,
            None => {
                eprintln!(
                    "config error: unknown scenario `{name}`; run `scaleqm list-scenarios`"
                );
                return ExitCode::from(2);
            }
        }
    }

    let out_dir = out
        .or_else(|| std::env::var_os("SCALEQM_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let ctx = RunContext {
        base_dir: config_path.parent().map(PathBuf::from).unwrap_or_default(),
    };

    let output = match run_scenario(&cfg, &ctx) {
        Ok(output) => output,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };

    for report in &output.reports {
        print_report(report);
    }
    let outcomes = output.outcomes();
    match write_report(cfg.scenario.name(), cfg.seed, &outcomes, &output.artifacts, &out_dir) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("cannot write reports: {e}");
            return ExitCode::from(2);
        }
    }

    let failed = outcomes.iter().filter(|c| !c.pass).count();
    if failed == 0 {
        println!("{} checks passed", outcomes.len());
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} checks failed", outcomes.len());
        ExitCode::from(1)
    }
}

fn print_report(report: &CheckReport) {
    let c = &report.outcome;
    let status = if c.pass { " ok " } else { "FAIL" };
    println!(
        "[{status}] {:<32} residual {:>12.4e}  tol {:>9.1e}  ({:.1} ms)",
        c.id, c.residual, c.tolerance, report.runtime_ms
    );
    if let Some(note) = &c.note {
        println!("       {}: {note}", c.id);
    }
}
