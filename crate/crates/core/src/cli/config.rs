//! Run configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;
use crate::algebra::DEFAULT_PRECISION;
use crate::checkers::{
    CapacityGrid, DEFAULT_DISTRIBUTION_THRESHOLD, DEFAULT_EPS_CAP, DEFAULT_MAX_FRACTION, DEFAULT_RESTRICTION,
};
use crate::problem::ProblemSpec;

pub const MARKOV_ARCSINE: &str = include_str!("../../configs/markov_arcsine.json");
pub const PAPER_SECTION4: &str = include_str!("../../configs/paper_section4.json");

/// Bundled configuration text by file or stem name.
pub fn bundled(name: &str) -> Option<&'static str> {
    match name.trim_end_matches(".json") {
        "markov_arcsine" => Some(MARKOV_ARCSINE),
        "paper_section4" => Some(PAPER_SECTION4),
        _ => None,
    }
}

fn default_true() -> bool {
    true
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Circle on which `|F - Π_n|` is sampled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleSpec {
    pub center: (f64, f64),
    pub radius: f64,
    pub points: usize,
}

impl Default for CircleSpec {
    fn default() -> Self {
        CircleSpec {
            center: (0.0, 0.0),
            radius: 1.0,
            points: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckerConfig {
    #[serde(default = "default_true")]
    pub variation_budget: bool,
    #[serde(default = "default_true")]
    pub pole_distribution: bool,
    #[serde(default = "default_true")]
    pub pole_attraction: bool,
    #[serde(default = "default_true")]
    pub capacity_convergence: bool,
    pub restriction: f64,
    pub distribution_threshold: f64,
    pub eps_cap: f64,
    pub max_fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<CapacityGrid>,
}

impl Default for CheckerConfig {
    fn default() -> Self {
        CheckerConfig {
            variation_budget: true,
            pole_distribution: true,
            pole_attraction: true,
            capacity_convergence: true,
            restriction: DEFAULT_RESTRICTION,
            distribution_threshold: DEFAULT_DISTRIBUTION_THRESHOLD,
            eps_cap: DEFAULT_EPS_CAP,
            max_fraction: DEFAULT_MAX_FRACTION,
            grid: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    #[serde(flatten)]
    pub problem: ProblemSpec,
    pub n_range: Vec<usize>,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub error_circle: CircleSpec,
    #[serde(default)]
    pub checkers: CheckerConfig,
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let c: ProblemConfig = serde_json::from_str(text).map_err(|e| CliError::InvalidConfig(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Reads a file, falling back to the bundled configs by name.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        match std::fs::read_to_string(path) {
            Ok(t) => Self::from_json(&t),
            Err(e) => match path.to_str().and_then(bundled) {
                Some(t) => Self::from_json(t),
                None => Err(CliError::Io(format!("{}: {e}", path.display()))),
            },
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_range.is_empty() {
            return Err(CliError::InvalidConfig("n_range is empty".into()));
        }
        if self.n_range.contains(&0) {
            return Err(CliError::InvalidConfig("n_range entries must be at least 1".into()));
        }
        if self.error_circle.points == 0 || !(self.error_circle.radius > 0.0) {
            return Err(CliError::InvalidConfig(
                "error_circle needs points > 0 and radius > 0".into(),
            ));
        }
        Ok(())
    }

    /// Sorted, deduplicated `n_range`.
    pub fn ns(&self) -> Vec<usize> {
        let mut v = self.n_range.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact serialization, lower-case hex.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Parses `"3,5,10-12"` into a list of orders.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || CliError::InvalidConfig(format!("bad entry `{part}` in --n"));
        match part.split_once('-') {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}
