use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every verb. Every field is optional so that a config
/// file can supply it; flags win over the file.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// Dimensions, comma separated.
    #[arg(long = "n", value_delimiter = ',', global = true)]
    pub n: Vec<usize>,
    /// Truncation degrees, comma separated.
    #[arg(long = "N", value_delimiter = ',', global = true)]
    pub degree: Vec<u32>,
    /// Fiber radii, comma separated.
    #[arg(long, value_delimiter = ',', global = true)]
    pub eps: Vec<f64>,
    /// Shrinking factors for the rho-calculus suite.
    #[arg(long, value_delimiter = ',', global = true)]
    pub rho: Vec<f64>,
    /// Radii |w| for the kernel table.
    #[arg(long, value_delimiter = ',', global = true)]
    pub radii: Vec<f64>,
    /// Metric jet JSON file.
    #[arg(long, global = true)]
    pub jet: Option<PathBuf>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Replaces every suite's relative tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// TOML file with the same keys as the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Monte Carlo sample count (accepts forms like 1e6).
    #[arg(long, global = true)]
    pub mc: Option<f64>,
    /// Restricts `verify` to the named suites.
    #[arg(long, value_delimiter = ',', global = true)]
    pub suite: Vec<String>,
    #[arg(long, hide = true, global = true)]
    pub mutate: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<Vec<usize>>,
    #[serde(rename = "N")]
    degree: Option<Vec<u32>>,
    eps: Option<Vec<f64>>,
    rho: Option<Vec<f64>>,
    radii: Option<Vec<f64>>,
    jet: Option<PathBuf>,
    trials: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    mc: Option<f64>,
    suite: Option<Vec<String>>,
}

/// Fully resolved settings. Empty grids mean "use the verb's default".
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: Vec<usize>,
    pub degree: Vec<u32>,
    pub eps: Vec<f64>,
    pub rho: Vec<f64>,
    pub radii: Vec<f64>,
    pub jet: Option<PathBuf>,
    pub trials: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub mc: Option<u64>,
    pub suite: Vec<String>,
    pub mutate: Option<String>,
}

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SEED: u64 = 20_240_917;

fn pick<T>(flag: Vec<T>, file: Option<Vec<T>>) -> Vec<T> {
    if flag.is_empty() {
        file.unwrap_or_default()
    } else {
        flag
    }
}

impl RunConfig {
    pub fn resolve(flags: Flags) -> Result<RunConfig, CliError> {
        let file = match &flags.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        let mc = match flags.mc.or(file.mc) {
            None => None,
            Some(x) if x.is_finite() && x >= 1.0 && x.fract() == 0.0 && x <= 1e12 => Some(x as u64),
            Some(x) => return Err(CliError::Usage(format!("--mc must be a positive integer, got {x}"))),
        };
        let cfg = RunConfig {
            n: pick(flags.n, file.n),
            degree: pick(flags.degree, file.degree),
            eps: pick(flags.eps, file.eps),
            rho: pick(flags.rho, file.rho),
            radii: pick(flags.radii, file.radii),
            jet: flags.jet.or(file.jet),
            trials: flags.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            tol: flags.tol.or(file.tol),
            out: flags.out.or(file.out),
            format: flags.format.or(file.format).unwrap_or_default(),
            mc,
            suite: pick(flags.suite, file.suite),
            mutate: flags.mutate,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(&n) = self.n.iter().find(|&&n| n == 0) {
            return Err(CliError::Usage(format!("--n must be at least 1, got {n}")));
        }
        if let Some(e) = self.eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(CliError::Usage(format!("--eps must be positive and finite, got {e}")));
        }
        if let Some(r) = self.rho.iter().find(|r| !(r.is_finite() && **r > 0.0 && **r <= 1.0)) {
            return Err(CliError::Usage(format!("--rho must lie in (0, 1], got {r}")));
        }
        if let Some(r) = self.radii.iter().find(|r| !(r.is_finite() && **r >= 0.0 && **r < 1.0)) {
            return Err(CliError::Usage(format!("--radii must lie in [0, 1), got {r}")));
        }
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub fn n_or(&self, default: &[usize]) -> Vec<usize> {
        if self.n.is_empty() { default.to_vec() } else { self.n.clone() }
    }

    pub fn degree_or(&self, default: &[u32]) -> Vec<u32> {
        if self.degree.is_empty() { default.to_vec() } else { self.degree.clone() }
    }

    pub fn eps_or(&self, default: &[f64]) -> Vec<f64> {
        if self.eps.is_empty() { default.to_vec() } else { self.eps.clone() }
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}
