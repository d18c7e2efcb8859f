//! `key = value` run configuration shared by all subcommands.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::Nonlinearity;

/// Keys that never change results and are left out of headers and cache keys.
const VOLATILE: [&str; 3] = ["out", "cache_dir", "threads"];

/// Ordered key/value settings. Command-line flags are merged over file entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", n + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::InvalidConfig(format!("line {}: empty key", n + 1)));
            }
            entries.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn set_opt<T: ToString>(&mut self, key: &str, value: Option<T>) {
        if let Some(v) = value {
            self.set(key, v);
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::InvalidConfig(format!("missing required setting '{key}'")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        parse_f64(key, self.require(key)?)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key).map_or(Ok(default), |v| parse_f64(key, v))
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        parse_list(key, self.require(key)?)
    }

    pub fn pair(&self, key: &str) -> Result<(f64, f64)> {
        match self.list(key)?.as_slice() {
            &[a, b] => Ok((a, b)),
            v => Err(Error::InvalidConfig(format!("'{key}' needs 2 values, got {}", v.len()))),
        }
    }

    /// `A,B,STEP` expanded to an inclusive grid.
    pub fn range(&self, key: &str) -> Result<Vec<f64>> {
        let v = self.list(key)?;
        let &[a, b, step] = v.as_slice() else {
            return Err(Error::InvalidConfig(format!("'{key}' needs A,B,STEP")));
        };
        if !(step > 0.0) || b < a {
            return Err(Error::InvalidConfig(format!("'{key}': need A <= B and STEP > 0")));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| a + step * k as f64).collect())
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity> {
        match self.get("model").unwrap_or("gross-neveu") {
            "gross-neveu" | "gn" => Ok(Nonlinearity::gross_neveu()),
            "poly" | "polynomial" => Nonlinearity::polynomial(&self.list("G_coeffs")?),
            other => Err(Error::InvalidConfig(format!("unknown model '{other}'"))),
        }
    }

    /// Entries that determine the output, in key order.
    pub fn stable_entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries
            .iter()
            .filter(|(k, _)| !VOLATILE.contains(&k.as_str()))
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("'{key}': '{v}' is not a number")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_f64(key, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_ranges() {
        let c = RunConfig::parse("# run\nomega = 0.5\nomega_range=0.2,0.3,0.05 # tail\n").unwrap();
        assert_eq!(c.f64("omega").unwrap(), 0.5);
        assert_eq!(c.range("omega_range").unwrap().len(), 3);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(RunConfig::parse("omega 0.5").is_err());
        assert!(RunConfig::parse("omega = x").unwrap().f64("omega").is_err());
    }

    #[test]
    fn volatile_keys_are_hidden() {
        let mut c = RunConfig::default();
        c.set("out", "a.csv");
        c.set("omega", 0.3);
        assert_eq!(c.stable_entries().collect::<Vec<_>>(), vec![("omega", "0.3")]);
    }
}
