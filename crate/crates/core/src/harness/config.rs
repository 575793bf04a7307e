//! Flat `key = value` configuration files.
//!
//! Keys use the long CLI flag names without dashes (`p`, `window`,
//! `mask-center`, ...). `#` starts a comment line. Command-line flags take
//! precedence over file values; that merge is done by the caller.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "line {}: expected `key = value`",
                    lineno + 1
                )));
            };
            let key = key.trim().trim_start_matches("--");
            if key.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "line {}: empty key",
                    lineno + 1
                )));
            }
            entries.insert(key.to_owned(), value.trim().to_owned());
        }
        Ok(KeyValues { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Parses the value stored under `key`, if any.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::InvalidConfig(format!("invalid value `{v}` for `{key}`")))
            })
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
    fn parses_flat_pairs() {
        let kv = KeyValues::parse("# comment\np = 2\n--window=5\nsource = original\n\n").unwrap();
        assert_eq!(kv.get::<u32>("p").unwrap(), Some(2));
        assert_eq!(kv.get::<usize>("window").unwrap(), Some(5));
        assert_eq!(kv.raw("source"), Some("original"));
        assert_eq!(kv.get::<u32>("q").unwrap(), None);
        assert_eq!(kv.keys().count(), 3);
    }

    #[test]
    fn reports_bad_lines_and_values() {
        assert!(KeyValues::parse("window 5").is_err());
        assert!(KeyValues::parse("= 5").is_err());
        let kv = KeyValues::parse("p = two").unwrap();
        assert!(matches!(kv.get::<u32>("p"), Err(Error::InvalidConfig(_))));
    }
}
