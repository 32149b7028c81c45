//! Plain `key = value` run configuration. `#` starts a comment; blank lines
//! are ignored. Flag overrides are applied on top of the file.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gtasep::{parse_rational, Rational};
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    /// Every key the run read, defaults included, so the echo reproduces it.
    values: BTreeMap<String, String>,
    #[serde(skip)]
    used: BTreeSet<String>,
}

fn valid_key(k: &str) -> bool {
    !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl RunConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| CliError::Config { path: path.to_path_buf(), line: i + 1, msg };
            let (k, v) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got '{line}'")))?;
            let (k, v) = (k.trim(), v.trim());
            if !valid_key(k) {
                return Err(err(format!("bad key '{k}'")));
            }
            if values.insert(k.to_string(), v.to_string()).is_some() {
                return Err(err(format!("duplicate key '{k}'")));
            }
        }
        Ok(Self { values, used: BTreeSet::new() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Applies a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got '{assignment}'")))?;
        let k = k.trim();
        if !valid_key(k) {
            return Err(CliError::Usage(format!("bad key '{k}'")));
        }
        self.values.insert(k.to_string(), v.trim().to_string());
        Ok(())
    }

    fn raw(&mut self, key: &str, default: Option<&str>) -> Result<String> {
        self.used.insert(key.to_string());
        if let Some(v) = self.values.get(key) {
            return Ok(v.clone());
        }
        let d = default.ok_or_else(|| CliError::Usage(format!("missing required key '{key}'")))?;
        self.values.insert(key.to_string(), d.to_string());
        Ok(d.to_string())
    }

    fn bad(key: &str, value: &str, why: impl Display) -> CliError {
        CliError::Usage(format!("key '{key}': cannot use '{value}': {why}"))
    }

    pub fn get<T: FromStr>(&mut self, key: &str, default: &str) -> Result<T>
    where
        T::Err: Display,
    {
        let v = self.raw(key, Some(default))?;
        v.parse().map_err(|e| Self::bad(key, &v, e))
    }

    pub fn rational(&mut self, key: &str, default: &str) -> Result<Rational> {
        let v = self.raw(key, Some(default))?;
        parse_rational(&v).map_err(|e| Self::bad(key, &v, e))
    }

    pub fn list<T: FromStr>(&mut self, key: &str, default: &str) -> Result<Vec<T>>
    where
        T::Err: Display,
    {
        let v = self.raw(key, Some(default))?;
        v.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse().map_err(|e| Self::bad(key, &v, e)))
            .collect()
    }

    /// Comma list whose items may be inclusive ranges `lo..hi`.
    pub fn index_list(&mut self, key: &str, default: &str) -> Result<Vec<usize>> {
        let v = self.raw(key, Some(default))?;
        let mut out = Vec::new();
        for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let num = |s: &str| s.trim().parse::<usize>().map_err(|e| Self::bad(key, &v, e));
            match item.split_once("..") {
                Some((lo, hi)) => {
                    let (lo, hi) = (num(lo)?, num(hi)?);
                    if lo > hi {
                        return Err(Self::bad(key, &v, "empty range"));
                    }
                    out.extend(lo..=hi);
                }
                None => out.push(num(item)?),
            }
        }
        if out.is_empty() {
            return Err(Self::bad(key, &v, "empty list"));
        }
        Ok(out)
    }

    /// Keys supplied but never read are almost always typos.
    pub fn check_unused(&self) -> Result<()> {
        let extra: Vec<&str> = self.values.keys().filter(|k| !self.used.contains(*k)).map(String::as_str).collect();
        if extra.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!("unknown config keys: {}", extra.join(", "))))
        }
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    /// The resolved configuration in the same `key = value` format.
    pub fn render(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

pub fn resolve(path: Option<&PathBuf>, overrides: &[String]) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for s in overrides {
        cfg.set(s)?;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_reports_lines() {
        let p = Path::new("run.cfg");
        let mut cfg = RunConfig::parse("# header\n l = 100 \n\nm=50 # half\n", p).unwrap();
        assert_eq!(cfg.get::<usize>("l", "1").unwrap(), 100);
        assert_eq!(cfg.get::<usize>("m", "1").unwrap(), 50);
        assert_eq!(cfg.get::<f64>("p", "0.25").unwrap(), 0.25);
        assert_eq!(cfg.values()["p"], "0.25");
        match RunConfig::parse("l = 1\nbroken line\n", p) {
            Err(CliError::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(RunConfig::parse("a = 1\na = 2", p), Err(CliError::Config { line: 2, .. })));
    }

    #[test]
    fn lists_ranges_and_unused_keys() {
        let mut cfg = RunConfig::parse("m = 1..3, 7\ntypo = 1", Path::new("x")).unwrap();
        assert_eq!(cfg.index_list("m", "1").unwrap(), vec![1, 2, 3, 7]);
        assert!(cfg.check_unused().is_err());
        assert!(cfg.index_list("n", "4..2").is_err());
    }

    #[test]
    fn render_round_trips() {
        let mut cfg = RunConfig::default();
        cfg.set("p = 1/3").unwrap();
        let _ = cfg.rational("p", "1/2").unwrap();
        let _ = cfg.get::<u64>("steps", "10").unwrap();
        let mut again = RunConfig::parse(&cfg.render(), Path::new("echo")).unwrap();
        assert_eq!(again.rational("p", "0").unwrap(), gtasep::scalar::ratio(1, 3));
        assert_eq!(again.get::<u64>("steps", "0").unwrap(), 10);
    }
}
