// SPDX-License-Identifier: Apache-2.0

//! Run configuration, dataset presets, and seed derivation.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompositionConfig {
    pub k_max: usize,
    /// Minimum number of untouched lines between two composed blocks.
    pub stride: usize,
    /// Composition attempts per (task, k).
    pub m2: usize,
    /// Variants kept per (task, k) after subsampling.
    pub m3: usize,
}

impl Default for CompositionConfig {
    fn default() -> Self {
        CompositionConfig { k_max: 4, stride: 3, m2: 100, m3: 5 }
    }
}

impl CompositionConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.stride == 0 {
            return Err(ConfigError::Invalid("stride must be at least 1".into()));
        }
        if self.k_max < 1 {
            return Err(ConfigError::Invalid("k_max must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SingleLineConfig {
    /// Generation attempts per task.
    pub m1: usize,
    /// How many eligible lines a spec offers the generator.
    pub candidate_lines: usize,
    pub compose: CompositionConfig,
    pub epsilon: usize,
}

impl Default for SingleLineConfig {
    fn default() -> Self {
        SingleLineConfig { m1: 20, candidate_lines: 3, compose: CompositionConfig::default(), epsilon: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiLineConfig {
    pub m1: usize,
    pub b_max: usize,
    pub compose: CompositionConfig,
    pub epsilon: usize,
}

impl Default for MultiLineConfig {
    fn default() -> Self {
        MultiLineConfig {
            m1: 20,
            b_max: 4,
            compose: CompositionConfig { k_max: 3, stride: 5, m2: 100, m3: 5 },
            epsilon: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub single: SingleLineConfig,
    pub multi: MultiLineConfig,
    /// Systems that must solve an example perfectly before the easy filter drops it.
    pub easy_threshold: usize,
    pub max_attempts: usize,
    pub temperature: f64,
    pub max_output_tokens: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            single: SingleLineConfig::default(),
            multi: MultiLineConfig::default(),
            easy_threshold: 7,
            max_attempts: 3,
            temperature: 1.0,
            max_output_tokens: 8000,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.single.compose.validate()?;
        self.multi.compose.validate()?;
        if self.multi.b_max < 2 {
            return Err(ConfigError::Invalid("multi.b_max must be at least 2".into()));
        }
        if self.max_attempts == 0 {
            return Err(ConfigError::Invalid("max_attempts must be at least 1".into()));
        }
        Ok(())
    }
}

/// An independent, reproducible RNG stream for `(seed, labels...)`.
pub fn derive_rng(seed: u64, labels: &[&str]) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    for label in labels {
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
    }
    ChaCha8Rng::from_seed(h.finalize().into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn defaults_match_presets() {
        let c = Config::default();
        assert_eq!((c.single.m1, c.single.compose.k_max, c.single.compose.stride), (20, 4, 3));
        assert_eq!((c.single.compose.m2, c.single.compose.m3, c.single.epsilon), (100, 5, 2));
        assert_eq!((c.multi.b_max, c.multi.compose.stride, c.multi.compose.k_max, c.multi.epsilon), (4, 5, 3, 1));
        assert_eq!(c.easy_threshold, 7);
    }

    #[test]
    fn partial_toml_keeps_defaults() {
        let c = Config::from_toml("seed = 9\n[single.compose]\nm3 = 2\n").unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.single.compose.m3, 2);
        assert_eq!(c.single.compose.m2, 100);
        assert!(Config::from_toml("bogus = 1").is_err());
        assert!(Config::from_toml("[single.compose]\nstride = 0").is_err());
    }

    #[test]
    fn streams_are_stable_and_distinct() {
        let a: u64 = derive_rng(1, &["t1"]).gen();
        assert_eq!(a, derive_rng(1, &["t1"]).gen::<u64>());
        assert_ne!(a, derive_rng(2, &["t1"]).gen::<u64>());
        assert_ne!(a, derive_rng(1, &["t2"]).gen::<u64>());
        // label boundaries matter
        assert_ne!(derive_rng(1, &["ab", "c"]).gen::<u64>(), derive_rng(1, &["a", "bc"]).gen::<u64>());
    }
}
