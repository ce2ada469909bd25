//! Flat `key = value` config files.
//!
//! Keys are the long flag names (`a-f`, `w_rate` and `w-rate` both work).
//! Lists are comma separated. `#` starts a comment.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

const KEYS: &[&str] = &[
    "alpha",
    "beta",
    "w-rate",
    "a-f",
    "n-min",
    "n-max",
    "n-points",
    "shipping",
    "wind",
    "f-lo",
    "f-hi",
    "l-ref",
    "delta-f",
    "seed",
    "runs",
    "out",
    "format",
    "points",
    "l",
    "l-min",
    "l-max",
    "distance",
    "capacity",
    "power",
    "n",
    "slots",
    "mode",
    "random-sets",
    "noise",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Input(format!("config line {}: expected key = value", i + 1))
            })?;
            let key = k.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Input(format!(
                    "config line {}: unknown key {:?}",
                    i + 1,
                    k.trim()
                )));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::Input(format!("config key {key}: bad value {v:?}")))
            })
            .transpose()
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        let Some(v) = self.values.get(key) else {
            return Ok(None);
        };
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| CliError::Input(format!("config key {key}: bad entry {s:?}")))
            })
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
    }

    /// Flag, then file, then `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.pick_opt(flag, key)?.unwrap_or(default))
    }

    pub fn pick_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    pub fn pick_list<T: FromStr>(
        &self,
        flag: Vec<T>,
        key: &str,
        default: Vec<T>,
    ) -> Result<Vec<T>, CliError> {
        if !flag.is_empty() {
            return Ok(flag);
        }
        Ok(self.get_list(key)?.unwrap_or(default))
    }
}
