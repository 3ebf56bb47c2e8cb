//! Run settings: built-in defaults, then the `HIDPOS_SEED` variable, then an
//! optional TOML file, then command-line flags.

use std::path::Path;

use hidpos::algebra::rational;
use hidpos::{Rational, SamplingConfig};
use serde::Deserialize;
use thiserror::Error;

pub const SEED_ENV: &str = "HIDPOS_SEED";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config {path}: {source}")]
    Toml { path: String, source: toml::de::Error },
    #[error("invalid {what}: {value}")]
    Value { what: String, value: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub sampling: SamplingConfig,
    /// Degree budget for `certify` statements without `dmax`.
    pub dmax: u32,
    /// Shift for `certify` statements without `eps`.
    pub eps: Rational,
    /// Force every checked adjunction past failed or undecided regularity.
    pub force: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { sampling: SamplingConfig::default(), dmax: 4, eps: rational::int(0), force: false }
    }
}

/// Every field optional; unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub delta: Option<f64>,
    pub zero_tol: Option<f64>,
    pub sign_tol: Option<f64>,
    pub tau_rel: Option<f64>,
    pub tau_pos: Option<f64>,
    pub dmax: Option<u32>,
    /// A rational such as `"1/10"`.
    pub eps: Option<String>,
    pub force: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, ConfigError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: p.clone(), source })?;
        toml::from_str(&text).map_err(|source| ConfigError::Toml { path: p, source })
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merged(self, over: FileConfig) -> FileConfig {
        FileConfig {
            seed: over.seed.or(self.seed),
            samples: over.samples.or(self.samples),
            delta: over.delta.or(self.delta),
            zero_tol: over.zero_tol.or(self.zero_tol),
            sign_tol: over.sign_tol.or(self.sign_tol),
            tau_rel: over.tau_rel.or(self.tau_rel),
            tau_pos: over.tau_pos.or(self.tau_pos),
            dmax: over.dmax.or(self.dmax),
            eps: over.eps.or(self.eps),
            force: over.force.or(self.force),
        }
    }
}

/// The seed named by the environment, if any.
pub fn env_seed() -> Result<Option<u64>, ConfigError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| ConfigError::Value { what: SEED_ENV.into(), value: v }),
        Err(_) => Ok(None),
    }
}

impl RunConfig {
    /// Defaults, then the environment seed, then `layers` in increasing priority.
    pub fn resolve(env_seed: Option<u64>, layers: impl IntoIterator<Item = FileConfig>) -> Result<RunConfig, ConfigError> {
        let base = FileConfig { seed: env_seed, ..FileConfig::default() };
        let f = layers.into_iter().fold(base, FileConfig::merged);
        let mut c = RunConfig::default();
        let s = &mut c.sampling;
        s.seed = f.seed.unwrap_or(s.seed);
        s.samples = f.samples.unwrap_or(s.samples);
        s.delta = f.delta.unwrap_or(s.delta);
        s.zero_tol = f.zero_tol.unwrap_or(s.zero_tol);
        s.sign_tol = f.sign_tol.unwrap_or(s.sign_tol);
        s.tau_rel = f.tau_rel.unwrap_or(s.tau_rel);
        s.tau_pos = f.tau_pos.unwrap_or(s.tau_pos);
        for (what, v) in [("delta", s.delta), ("zero_tol", s.zero_tol), ("sign_tol", s.sign_tol), ("tau_rel", s.tau_rel), ("tau_pos", s.tau_pos)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::Value { what: what.into(), value: v.to_string() });
            }
        }
        if s.samples == 0 {
            return Err(ConfigError::Value { what: "samples".into(), value: "0".into() });
        }
        c.dmax = f.dmax.unwrap_or(c.dmax);
        if let Some(e) = f.eps {
            c.eps = rational::parse(&e).map_err(|_| ConfigError::Value { what: "eps".into(), value: e.clone() })?;
        }
        c.force = f.force.unwrap_or(c.force);
        Ok(c)
    }
}
