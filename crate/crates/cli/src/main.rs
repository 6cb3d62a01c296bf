// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qpmp_cli::commands::{
    classify_command, qre_bangbang_command, solve_command, verify_command, Overrides,
};
use qpmp_cli::config::ModeConfig;
use qpmp_cli::CliResult;

/// Extremal controls of open quantum systems.
#[derive(Parser)]
#[command(name = "qpmp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "qpmp-out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random starts.
    #[arg(long)]
    starts: Option<usize>,
    /// Grid intervals (the switch grid for qre-bangbang).
    #[arg(long)]
    grid: Option<usize>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            starts: self.starts,
            grid: self.grid,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fixed initial state, objective at the final time.
    SolveTerminal(RunArgs),
    /// Objective on the periodic orbit.
    SolvePeriodic(RunArgs),
    /// Arc structure of a trajectory table.
    Classify {
        file: PathBuf,
        /// Defaults to config.toml next to the file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks one of the structure theorems (1-4).
    Verify {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        theorem: u8,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Exhaustive bang-bang search on a switch grid.
    QreBangbang(RunArgs),
}

fn run(cli: Cli) -> CliResult<String> {
    let report = match cli.command {
        Command::SolveTerminal(a) => {
            solve_command(&a.config, &a.out, ModeConfig::Terminal, &a.overrides())?
        }
        Command::SolvePeriodic(a) => {
            solve_command(&a.config, &a.out, ModeConfig::Periodic, &a.overrides())?
        }
        Command::Classify { file, config, out } => {
            classify_command(&file, config.as_deref(), out.as_deref())?
        }
        Command::Verify { theorem, run } => {
            verify_command(theorem, &run.config, &run.out, &run.overrides())?
        }
        Command::QreBangbang(a) => qre_bangbang_command(&a.config, &a.out, &a.overrides())?,
    };
    Ok(report.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qpmp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
