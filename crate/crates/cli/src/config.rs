//! Run configuration: a TOML file merged with command-line overrides.

use std::fmt;
use std::path::Path;

use anyhow::{Context, Result};
use convrad::{ProfileConfig, ProfileKind};
use serde::{Deserialize, Serialize};

/// An error in the user's input rather than in the numerics.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Numeric knobs, every one optional in the file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunParams {
    pub n_dirs: Option<usize>,
    pub horizon: Option<f64>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    /// Sample points per suite.
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub profile: Option<ProfileConfig>,
    #[serde(default)]
    pub run: RunParams,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
    }
}

/// Everything a command runs with, after defaults. Embedded in every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub profile: ProfileConfig,
    pub n_dirs: usize,
    pub horizon: f64,
    pub seed: u64,
    pub tol: f64,
    pub points: usize,
}

impl RunConfig {
    pub fn resolve(
        command: String,
        file: &ConfigFile,
        flags: &RunParams,
        default_kind: ProfileKind,
        default_dirs: usize,
    ) -> Result<Self> {
        let pick = |f: Option<f64>, c: Option<f64>, d: f64| f.or(c).unwrap_or(d);
        let cfg = Self {
            command,
            profile: file.profile.unwrap_or(ProfileConfig::new(default_kind)).resolved(),
            n_dirs: flags.n_dirs.or(file.run.n_dirs).unwrap_or(default_dirs),
            horizon: pick(flags.horizon, file.run.horizon, 20.0),
            seed: flags.seed.or(file.run.seed).unwrap_or(0),
            tol: pick(flags.tol, file.run.tol, 1e-3),
            points: flags.points.or(file.run.points).unwrap_or(50),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.n_dirs < 2 {
            return Err(config_error(format!("n_dirs = {} must be at least 2", self.n_dirs)));
        }
        if self.points == 0 {
            return Err(config_error("points must be positive"));
        }
        for (name, v) in [("horizon", self.horizon), ("tol", self.tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_error(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }
}
