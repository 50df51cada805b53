//! Command-line arguments and the JSON config file that mirrors them.
//!
//! Every flag lands in a [`RunConfig`]; a `--config` file supplies values
//! for flags that were not given on the command line.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Environment variable naming the directory for relative output paths.
pub const OUT_DIR_ENV: &str = "GAUDIN_OUT_DIR";
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(
    name = "gaudin",
    version,
    about = "Elliptic Gaudin model: special functions, Bethe roots and spectra"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every multi-start search.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Significant digits of printed numbers.
    #[arg(long, global = true)]
    pub digits: Option<usize>,
    /// JSON file with defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; relative paths resolve against $GAUDIN_OUT_DIR.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Elliptic constants and sn, cn, dn, φ₁, φ₄ at complex points.
    Special(SpecialArgs),
    /// Couplings, Bethe solutions and exact spectrum of a small system.
    ThreeSpin(ThreeSpinArgs),
    /// Central spin model ground state traced in N and extrapolated.
    Acsm(AcsmArgs),
    /// Runs the consistency checks and writes a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SpecialArgs {
    /// Elliptic modulus in (0, 1)
    #[arg(long)]
    pub k: Option<f64>,
    /// Print K, K′, q and C.
    #[arg(long)]
    pub constants: bool,
    /// Complex point such as `0.2`, `0.1+0.3i`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub eval: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ThreeSpinArgs {
    /// Elliptic modulus in (0, 1)
    #[arg(long)]
    pub k: Option<f64>,
    /// Site parameters, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub z: Option<Vec<f64>>,
    /// Spin magnitudes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub spins: Option<Vec<f64>>,
    /// Hamiltonian coefficients c_i of Σ c_i R_i, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
    /// Restrict to one parity sector (0 or 1).
    #[arg(long)]
    pub sector: Option<u8>,
    /// Newton starts per sector.
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AcsmArgs {
    /// Left end of the bath grid
    #[arg(long)]
    pub a: Option<f64>,
    /// Right end of the bath grid, at most K
    #[arg(long)]
    pub b: Option<f64>,
    /// Elliptic modulus in (0, 1)
    #[arg(long)]
    pub k: Option<f64>,
    /// Sizes N, comma separated and increasing.
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<usize>>,
    /// Multi-start attempts for the smallest N.
    #[arg(long)]
    pub attempts: Option<usize>,
    /// JSON dump of every root set.
    #[arg(long)]
    pub roots_out: Option<PathBuf>,
    /// Number of excited states sampled at the smallest N.
    #[arg(long)]
    pub excited: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suites to run, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<String>>,
    /// Random points per special-function identity.
    #[arg(long)]
    pub points: Option<usize>,
    /// Test hook: build couplings with k² in place of k.
    #[arg(long, hide = true)]
    pub inject_modulus_squared: bool,
}

/// Union of all settings. Unset fields fall back to per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub digits: Option<usize>,
    pub out: Option<PathBuf>,
    pub k: Option<f64>,
    pub constants: Option<bool>,
    pub eval: Option<Vec<String>>,
    pub z: Option<Vec<f64>>,
    pub spins: Option<Vec<f64>>,
    pub coeffs: Option<Vec<f64>>,
    pub sector: Option<u8>,
    pub budget: Option<usize>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub schedule: Option<Vec<usize>>,
    pub attempts: Option<usize>,
    pub roots_out: Option<PathBuf>,
    pub excited: Option<usize>,
    pub only: Option<Vec<String>>,
    pub points: Option<usize>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(
            self, base, seed, digits, out, k, constants, eval, z, spins, coeffs, sector, budget, a,
            b, schedule, attempts, roots_out, excited, only, points
        )
    }

    /// Settings given on the command line.
    pub fn from_cli(cli: &Cli) -> RunConfig {
        let g = &cli.global;
        let mut c = RunConfig {
            seed: g.seed,
            digits: g.digits,
            out: g.out.clone(),
            ..Default::default()
        };
        match &cli.command {
            Command::Special(s) => {
                c.k = s.k;
                c.constants = s.constants.then_some(true);
                c.eval = (!s.eval.is_empty()).then(|| s.eval.clone());
            }
            Command::ThreeSpin(t) => {
                c.k = t.k;
                c.z = t.z.clone();
                c.spins = t.spins.clone();
                c.coeffs = t.coeffs.clone();
                c.sector = t.sector;
                c.budget = t.budget;
            }
            Command::Acsm(a) => {
                c.a = a.a;
                c.b = a.b;
                c.k = a.k;
                c.schedule = a.schedule.clone();
                c.attempts = a.attempts;
                c.roots_out = a.roots_out.clone();
                c.excited = a.excited;
            }
            Command::Verify(v) => {
                c.only = v.only.clone();
                c.points = v.points;
            }
        }
        c
    }

    /// Command-line settings over the optional config file.
    pub fn resolve(cli: &Cli) -> CliResult<RunConfig> {
        let top = Self::from_cli(cli);
        match &cli.global.config {
            Some(path) => Ok(top.over(Self::load(path)?)),
            None => Ok(top),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn digits(&self) -> CliResult<usize> {
        match self.digits {
            Some(0) | Some(18..) => Err(CliError::Usage("--digits must be in 1..=17".into())),
            Some(d) => Ok(d),
            None => Ok(crate::format::DEFAULT_DIGITS),
        }
    }
}

/// Relative paths are placed under `$GAUDIN_OUT_DIR` when it is set.
pub fn resolve_output_path(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_line_wins_over_file() {
        let file = RunConfig {
            k: Some(0.3),
            seed: Some(5),
            z: Some(vec![0.0, 0.1]),
            ..Default::default()
        };
        let cli = RunConfig {
            k: Some(0.5),
            ..Default::default()
        };
        let merged = cli.over(file);
        assert_eq!(merged.k, Some(0.5));
        assert_eq!(merged.seed, Some(5));
        assert_eq!(merged.z, Some(vec![0.0, 0.1]));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"kk": 1}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"k": 0.5, "schedule": [12, 20]}"#).is_ok());
    }
}
