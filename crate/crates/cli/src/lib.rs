//! Command-line front end: special-function tables, the three-spin
//! reproduction, the central spin continuation and verification suites.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;

use std::fs::File;
use std::io::{BufWriter, Write};

use gaudin_core::spinops::CouplingConvention;

use commands::{verify, Outcome};
use config::{resolve_output_path, Cli, Command, RunConfig};
use error::{CliError, CliResult};

/// Stdout, or the `--out` file.
fn open_output(cfg: &RunConfig) -> CliResult<Box<dyn Write>> {
    Ok(match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(resolve_output_path(path))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let cfg = RunConfig::resolve(cli)?;
    let outcome = match &cli.command {
        Command::Special(_) => Outcome {
            tables: commands::special::run(&cfg)?,
            failure: None,
        },
        Command::ThreeSpin(_) => commands::three_spin::run(&cfg)?,
        Command::Acsm(_) => commands::acsm::run(&cfg)?,
        Command::Verify(v) => return run_verify(&cfg, v.inject_modulus_squared),
    };
    let mut out = open_output(&cfg)?;
    format::write_tables(&outcome.tables, &mut out)?;
    out.flush()?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn run_verify(cfg: &RunConfig, inject: bool) -> CliResult<()> {
    let convention = if inject {
        CouplingConvention::ModulusSquared
    } else {
        CouplingConvention::Modulus
    };
    let opts = verify::VerifyOptions::from_config(cfg, convention)?;
    let report = verify::run_suites(&opts);
    let mut out = open_output(cfg)?;
    let text = serde_json::to_string_pretty(&report).expect("report serialises");
    writeln!(out, "{text}")?;
    out.flush()?;
    match report.first_failure {
        Some(name) => Err(CliError::Verification(name)),
        None => Ok(()),
    }
}
