mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use crate::commands::CliError;
use crate::config::{Cli, RunConfig};

const EXIT_CONFIG: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

fn write_output(cfg: &RunConfig, body: &str) -> anyhow::Result<()> {
    match &cfg.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
        }
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .context("writing to stdout"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::from_cli(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = match commands::run(&cfg) {
        Ok(report) => report,
        Err(e @ (CliError::Config(_) | CliError::Core(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Err(e) = write_output(&cfg, &report.body) {
        eprintln!("error: {e:#}");
        return ExitCode::FAILURE;
    }
    if !report.violations.is_empty() {
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        return ExitCode::from(EXIT_VIOLATION);
    }
    ExitCode::SUCCESS
}
