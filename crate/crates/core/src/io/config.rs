//! Solver configuration files.
//!
//! A config file is flat TOML holding any subset of the solver keys:
//!
//! ```toml
//! lambda = 0.125
//! mu = 10.0
//! max_iters = 3000
//! epsilon = 1e-7
//! ```
//!
//! Command-line flags override the file, which overrides the defaults.

use std::path::Path;

use serde::Deserialize;

use crate::decompose::SolverConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub max_iters: Option<usize>,
    pub epsilon: Option<f64>,
}

impl ConfigOverrides {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            path: path.into(),
            reason: e.message().to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Later layers win.
    pub fn layered(self, over: ConfigOverrides) -> Self {
        Self {
            lambda: over.lambda.or(self.lambda),
            mu: over.mu.or(self.mu),
            max_iters: over.max_iters.or(self.max_iters),
            epsilon: over.epsilon.or(self.epsilon),
        }
    }

    pub fn apply(self, base: SolverConfig) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            lambda: self.lambda.unwrap_or(base.lambda),
            mu: self.mu.unwrap_or(base.mu),
            max_iters: self.max_iters.unwrap_or(base.max_iters),
            epsilon: self.epsilon.unwrap_or(base.epsilon),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Flags over file over defaults.
pub fn resolve(file: Option<&Path>, flags: ConfigOverrides) -> Result<SolverConfig> {
    let from_file = match file {
        Some(p) => ConfigOverrides::load(p)?,
        None => ConfigOverrides::default(),
    };
    from_file.layered(flags).apply(SolverConfig::default())
}
