//! Scenario files: one `key = value` per line, `#` starts a comment.
//!
//! Keys are the [`ScenarioConfig`] field names. Power-valued keys also accept
//! a decibel form with a `_db` suffix (`p_max_db`, `sigma2_db`); lists are
//! comma-separated. Keys that are absent keep their defaults.

use std::path::{Path, PathBuf};

use thiserror::Error;
use twocell_core::{db_to_linear, scenario, CandidateMode, ScenarioConfig, SnrReference};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` given more than once")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        reason: String,
    },
    #[error(transparent)]
    Invalid(#[from] twocell_core::Error),
}

/// A parsed scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub scenario: ScenarioConfig,
    /// Rate floors for the `feasibility` subcommand.
    pub r_min_values: Option<Vec<f64>>,
}

pub fn load_config(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

fn canonical_key(key: &str) -> &str {
    match key {
        "p_max_db" => "p_max",
        "sigma2_db" => "sigma2",
        other => other,
    }
}

pub fn parse_config(text: &str) -> Result<ConfigFile, ConfigError> {
    let mut config = ScenarioConfig::default();
    let mut r_min_values = None;
    let mut seen: Vec<String> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or(ConfigError::Syntax { line })?;
        if key.is_empty() {
            return Err(ConfigError::Syntax { line });
        }
        let canonical = canonical_key(key);
        if seen.iter().any(|k| k == canonical) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
            });
        }
        seen.push(canonical.to_string());

        let bad = |reason: &str| ConfigError::BadValue {
            line,
            key: key.to_string(),
            reason: reason.to_string(),
        };
        let float = || -> Result<f64, ConfigError> {
            value.parse::<f64>().map_err(|_| bad("expected a number"))
        };
        let count = || -> Result<usize, ConfigError> {
            value
                .parse::<usize>()
                .map_err(|_| bad("expected a non-negative integer"))
        };
        let list = || -> Result<Vec<f64>, ConfigError> {
            if value.is_empty() {
                return Ok(Vec::new());
            }
            value
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad("expected a comma-separated list of numbers"))
        };

        match key {
            "num_cells" => config.num_cells = count()?,
            "num_users_per_cell" => config.num_users_per_cell = count()?,
            "num_subchannels" => config.num_subchannels = count()?,
            "p_max" => config.p_max = float()?,
            "p_max_db" => config.p_max = db_to_linear(float()?),
            "sigma2" => config.sigma2 = float()?,
            "sigma2_db" => config.sigma2 = db_to_linear(float()?),
            "r_min" => config.r_min = float()?,
            "alpha" => config.alpha = float()?,
            "d_serving" => config.d_serving = float()?,
            "d_cross" => config.d_cross = float()?,
            "trials" => config.trials = count()?,
            "snr_grid_db" => config.snr_grid_db = list()?,
            "seed" => {
                config.seed = value
                    .parse::<u64>()
                    .map_err(|_| bad("expected a 64-bit unsigned integer"))?
            }
            "snr_reference" => {
                config.snr_reference = match value {
                    "serving" => SnrReference::Serving,
                    "transmit" => SnrReference::Transmit,
                    _ => return Err(bad("expected `serving` or `transmit`")),
                }
            }
            "power_mode" => {
                config.power_mode = match value {
                    "paper" => CandidateMode::Paper,
                    "extended" => CandidateMode::Extended,
                    _ => return Err(bad("expected `paper` or `extended`")),
                }
            }
            "exhaustive_cap" => config.exhaustive_cap = count()?,
            "r_min_values" => r_min_values = Some(list()?),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
    }

    Ok(ConfigFile {
        scenario: scenario::validate_config(config)?,
        r_min_values,
    })
}
