//! Flat `key = value` configuration files with dotted keys.
//!
//! ```text
//! # comment
//! chain.n_nodes = 12
//! chain.lambda_schedule = 1e-6
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Lists are
//! comma-separated.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::chain::ChainConfig;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("missing key {0:?}")]
    MissingKey(String),
    #[error("invalid value for {key:?}: {reason}")]
    InvalidValue { key: String, reason: String },
}

/// Parsed entries in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
}

impl KeyValues {
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (i, raw) in source.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    reason: "expected `key = value`".into(),
                });
            };
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    reason: format!("bad key {key:?}"),
                });
            }
            if entries.iter().any(|(k, _)| k == key) {
                return Err(ConfigError::DuplicateKey(key.to_string()));
            }
            entries.push((key.to_string(), value.trim().to_string()));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        let value = value.into();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    /// Rejects any key outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(ConfigError::UnknownKey(k.to_string())),
            None => Ok(()),
        }
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key).ok_or_else(|| ConfigError::MissingKey(key.to_string()))
    }

    /// Parses `key` if present.
    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| parse_value(key, v))
            .transpose()
    }

    /// Parses a comma-separated list at `key` if present.
    pub fn parsed_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.split(',').map(|item| parse_value(key, item.trim())).collect())
            .transpose()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            writeln!(out, "{k} = {v}").expect("write to String");
        }
        out
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::InvalidValue {
        key: key.to_string(),
        reason: format!("{value:?}: {e}"),
    })
}

pub const CHAIN_KEYS: [&str; 7] = [
    "chain.n_nodes",
    "chain.lambda_schedule",
    "chain.mu_schedule",
    "chain.max_iters_per_epoch",
    "chain.tol",
    "chain.seed",
    "chain.init_margin",
];

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

impl ChainConfig {
    /// Reads `chain.*` keys; absent keys keep their default values.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self, ConfigError> {
        let mut cfg = ChainConfig::default();
        if let Some(v) = kv.parsed("chain.n_nodes")? {
            cfg.n_nodes = v;
        }
        if let Some(v) = kv.parsed_list("chain.lambda_schedule")? {
            cfg.lambda_schedule = v;
        }
        if let Some(v) = kv.parsed_list("chain.mu_schedule")? {
            cfg.mu_schedule = v;
        }
        if let Some(v) = kv.parsed("chain.max_iters_per_epoch")? {
            cfg.max_iters_per_epoch = v;
        }
        if let Some(v) = kv.parsed("chain.tol")? {
            cfg.tol = v;
        }
        if let Some(v) = kv.parsed("chain.seed")? {
            cfg.seed = v;
        }
        if let Some(v) = kv.parsed("chain.init_margin")? {
            cfg.init_margin = v;
        }
        cfg.validate().map_err(|e| ConfigError::InvalidValue {
            key: "chain".into(),
            reason: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::default();
        kv.insert("chain.n_nodes", self.n_nodes.to_string());
        kv.insert("chain.lambda_schedule", join(&self.lambda_schedule));
        kv.insert("chain.mu_schedule", join(&self.mu_schedule));
        kv.insert("chain.max_iters_per_epoch", self.max_iters_per_epoch.to_string());
        kv.insert("chain.tol", self.tol.to_string());
        kv.insert("chain.seed", self.seed.to_string());
        kv.insert("chain.init_margin", self.init_margin.to_string());
        kv
    }

    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let kv = KeyValues::parse(source)?;
        kv.check_keys(&CHAIN_KEYS)?;
        Self::from_key_values(&kv)
    }
}
