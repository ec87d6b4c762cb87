//! Flat `key = value` configuration files, overridden by command-line flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{bad, CliError, CliResult};

/// Settings read from a config file, restricted to the keys a subcommand accepts.
#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

/// Keys are case-sensitive; `-` and `_` are interchangeable.
pub fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Settings {
    /// Parse `text`; `#` starts a comment, blank lines are ignored.
    pub fn parse(text: &str, allowed: &[String]) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("config line {}: expected key = value, got {raw:?}", lineno + 1)))?;
            let key = normalize_key(key);
            if !allowed.contains(&key) {
                return Err(bad(format!(
                    "config line {}: unknown key {key:?} (accepted: {})",
                    lineno + 1,
                    allowed.join(", ")
                )));
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(bad(format!("config line {}: duplicate key {key:?}", lineno + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: Option<&Path>, allowed: &[String]) -> CliResult<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
                Self::parse(&text, allowed)
            }
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag if given, else the config value, else `None`.
    pub fn opt<T>(&self, key: &str, flag: Option<T>) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| bad(format!("config key {key}: cannot parse {v:?}: {e}"))))
            .transpose()
    }

    /// Like [`Settings::opt`], but a missing value is bad input.
    pub fn require<T>(&self, key: &str, flag: Option<T>) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.opt(key, flag)?.ok_or_else(|| bad(format!("missing required parameter {key}")))
    }

    pub fn get<T>(&self, key: &str, flag: Option<T>, default: T) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.opt(key, flag)?.unwrap_or(default))
    }
}
