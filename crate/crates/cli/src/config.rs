//! key=value configuration, from a file and/or the command line.
//!
//! Every subcommand takes its parameters as `key=value` arguments. A
//! `config=FILE` argument loads more pairs from a file (one per line, `#`
//! comments allowed); pairs given on the command line win over the file.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    used: std::cell::RefCell<std::collections::BTreeSet<String>>,
}

impl Config {
    pub fn from_args(args: &[String]) -> Result<Config> {
        let mut cli_pairs = Vec::new();
        let mut file_pairs = Vec::new();
        for arg in args {
            let (key, value) = arg
                .split_once('=')
                .ok_or_else(|| anyhow!("expected key=value, got {arg:?}"))?;
            if key == "config" {
                let text = std::fs::read_to_string(value)
                    .with_context(|| format!("reading config file {value}"))?;
                for line in text.lines() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let (k, v) = line
                        .split_once('=')
                        .ok_or_else(|| anyhow!("bad config line {line:?}"))?;
                    file_pairs.push((k.trim().to_string(), v.trim().to_string()));
                }
            } else {
                cli_pairs.push((key.to_string(), value.to_string()));
            }
        }
        let mut values = BTreeMap::new();
        for (k, v) in file_pairs.into_iter().chain(cli_pairs) {
            values.insert(k, v); // later (command-line) entries win
        }
        Ok(Config {
            values,
            used: Default::default(),
        })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| anyhow!("missing required parameter {key}"))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.require(key)?
            .parse()
            .map_err(|_| anyhow!("parameter {key} must be an integer"))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| anyhow!("parameter {key} must be an integer")),
            None => Ok(default),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| anyhow!("parameter {key} must be an integer")),
            None => Ok(default),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| anyhow!("parameter {key} must be a number")),
            None => Ok(default),
        }
    }

    pub fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            Some("0") => Ok(false),
            Some("1") => Ok(true),
            Some(other) => bail!("parameter {key} must be 0 or 1, got {other}"),
            None => Ok(default),
        }
    }

    /// Reject typos: every provided key must have been consumed.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        let unknown: Vec<&String> = self
            .values
            .keys()
            .filter(|k| !used.contains(*k))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            bail!("unknown parameter(s): {unknown:?}")
        }
    }
}
