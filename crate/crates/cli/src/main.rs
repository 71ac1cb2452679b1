mod commands;
mod config;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use loopalg::Error;

use crate::config::{Cli, Command, RunConfig, PRECISION_ENV};

const EXIT_FAIL: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_CAPACITY: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity(_) => EXIT_CAPACITY,
        Error::InvalidArgument(_) | Error::Parse(_) | Error::SingularParameter(_) => EXIT_INVALID,
        Error::Degenerate(_) => EXIT_FAIL,
    }
}

fn run(cli: &Cli) -> loopalg::Result<commands::Outcome> {
    let env = std::env::var(PRECISION_ENV).ok();
    let cfg = RunConfig::from_flags(&cli.flags, env.as_deref())?;
    if let Some(threads) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("--threads: {e}")))?;
    }
    if cfg.lambda_is_decimal() {
        eprintln!("notice: λ given as a decimal; it is treated as generic and critical-point analysis (Jordan predictions) is disabled");
    }
    match &cli.command {
        Command::Basis => commands::basis(&cfg),
        Command::Dmatrix => commands::dmatrix(&cfg),
        Command::Fmatrix => commands::fmatrix(&cfg),
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Jordan => commands::jordan(&cfg),
        Command::Potts { boundary } => commands::potts(&cfg, *boundary),
        Command::Verify { suite } => commands::verify(&cfg, suite),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.text.as_bytes());
            let _ = stdout.flush();
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
