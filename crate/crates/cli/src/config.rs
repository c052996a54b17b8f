//! Flat `key = value` run configuration with `#` comments.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

pub const KEYS: &[&str] = &[
    "a",
    "b",
    "tol",
    "strict",
    "out",
    "seed",
    "samples",
    "n",
    "sheet",
    "u_max",
    "x_max",
    "z_max",
    "format",
    "half_width",
    "resolution",
    "point",
    "xy",
    "id",
];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Read { path: String, message: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("`{key}`: cannot parse `{value}`")]
    Value { key: String, value: String },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            if !KEYS.contains(&k) {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: k.to_string(),
                });
            }
            if values.insert(k.to_string(), v.to_string()).is_some() {
                return Err(ConfigError::Duplicate {
                    line,
                    key: k.to_string(),
                });
            }
        }
        Ok(RunConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.raw(key)
            .map(|v| {
                v.parse().map_err(|_| ConfigError::Value {
                    key: key.to_string(),
                    value: v.to_string(),
                })
            })
            .transpose()
    }

    /// The flag value when given, else the config value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, ConfigError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let c = RunConfig::parse("# run\na = 1\n\nb=4 # steep\nseed = 7\n").unwrap();
        assert_eq!(c.get::<f64>("a").unwrap(), Some(1.0));
        assert_eq!(c.get::<f64>("b").unwrap(), Some(4.0));
        assert_eq!(c.get::<u64>("seed").unwrap(), Some(7));
        assert_eq!(c.get::<usize>("samples").unwrap(), None);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert_eq!(
            RunConfig::parse("a = 1\nc = 2").unwrap_err(),
            ConfigError::UnknownKey {
                line: 2,
                key: "c".into()
            }
        );
        assert!(matches!(RunConfig::parse("a = 1\na = 2"), Err(ConfigError::Duplicate { line: 2, .. })));
        assert!(matches!(RunConfig::parse("a 1"), Err(ConfigError::Syntax { line: 1 })));
        assert!(matches!(RunConfig::parse("a ="), Err(ConfigError::Syntax { line: 1 })));
    }

    #[test]
    fn flags_win() {
        let c = RunConfig::parse("b = 4").unwrap();
        assert_eq!(c.pick(Some(2.5), "b").unwrap(), Some(2.5));
        assert_eq!(c.pick::<f64>(None, "b").unwrap(), Some(4.0));
        assert!(c.pick::<f64>(None, "b").is_ok());
        let bad = RunConfig::parse("b = four").unwrap();
        assert!(bad.get::<f64>("b").is_err());
    }
}
