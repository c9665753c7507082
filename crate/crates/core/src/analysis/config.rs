use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Flat `key = value` settings; `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected `key = value`, got `{line}`") })?;
            let k = k.trim().replace('_', "-");
            if k.is_empty() {
                return Err(Error::Parse { line: i + 1, msg: "empty key".into() });
            }
            entries.insert(k, v.trim().to_string());
        }
        Ok(Self { entries })
    }

    /// Keys are normalized to dashes, so `beta_min` and `beta-min` match.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&key.replace('_', "-")).map(String::as_str)
    }

    pub fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::InvalidParameter(format!("config key `{key}`: cannot parse `{v}`"))))
            .transpose()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let c = Config::parse("# run\nbeta = 0.55  # tail\n\n dt=2.5e-4\nbeta_min = 0.5\n").unwrap();
        assert_eq!(c.get("beta"), Some("0.55"));
        assert_eq!(c.get_parsed::<f64>("dt").unwrap(), Some(2.5e-4));
        assert_eq!(c.get("beta-min"), Some("0.5"));
        assert_eq!(c.get("missing"), None);
        assert_eq!(c.keys().count(), 3);
    }

    #[test]
    fn rejects_bad_lines() {
        assert_eq!(Config::parse("a = 1\nnonsense\n"), Err(Error::Parse { line: 2, msg: "expected `key = value`, got `nonsense`".into() }));
        assert!(Config::parse("= 3").is_err());
        assert!(Config::parse("dt = x").unwrap().get_parsed::<f64>("dt").is_err());
    }
}
