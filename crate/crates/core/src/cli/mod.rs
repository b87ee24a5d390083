//! `orbitwalk` command-line front end.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::Parser;

use crate::error::Error;
use config::{Command, Format, Overrides};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "orbitwalk", version, about = "Quantum-walk kernels on lattice orbit spaces")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a config field by dotted path, e.g. `--set space.length=6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_shell: Option<u32>,
    /// Output window `lo:hi` for single-coordinate labels.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub precision: Option<usize>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } | Error::EigenConvergence(_) | Error::Overflow(_) => EXIT_CONVERGENCE,
        _ => EXIT_CONFIG,
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run(args: Args) -> i32 {
    let ov = Overrides {
        sets: args.set,
        tolerance: args.tolerance,
        max_shell: args.max_shell,
        window: args.window,
        output: args.output,
        format: args.format,
        precision: args.precision,
    };
    let (cfg, resolved) = match config::load(args.config.as_deref(), args.command, &ov) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = match cfg.command {
        Command::Evolve => commands::run_evolve(&cfg).map(|r| (r, true)),
        Command::Resolvent => commands::run_resolvent(&cfg).map(|r| (r, true)),
        Command::Thermal => commands::run_thermal(&cfg).map(|r| (r, true)),
        Command::Dos => commands::run_dos(&cfg).map(|r| (r, true)),
        Command::Coined => commands::run_coined(&cfg).map(|r| (r, true)),
        Command::Verify => commands::run_verify(&cfg),
    };
    let (report, passed) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let text = output::render(&report, &resolved, cfg.output.format, cfg.output.precision);
    let written = match &cfg.output.path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {p}: {e}")),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    if passed {
        EXIT_OK
    } else {
        eprintln!("verification failed");
        EXIT_VERIFY
    }
}
