//! Resolved command specifications.
//!
//! A value comes from the command line if given there, else from the
//! `--config` file, else from the key's default. Config files use
//! `key = value` lines with the flag names as keys; `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use cmc_duality::graph::Window;

/// One accepted key of a subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

pub const fn key(name: &'static str, default: Option<&'static str>, help: &'static str) -> Key {
    Key { name, default, help }
}

/// The repeatable `--param name=value` key carrying fixture parameters.
pub const PARAM: &str = "param";

#[derive(Debug, Clone, PartialEq)]
pub struct UsageError {
    pub key: String,
    pub message: String,
}

impl UsageError {
    pub fn new(key: &str, message: impl Into<String>) -> Self {
        Self { key: key.to_string(), message: message.into() }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid value for '{}': {}", self.key, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommandSpec {
    pub subcommand: String,
    pub parameters: BTreeMap<String, String>,
    /// Fixture parameters from `--param`.
    pub fixture_params: BTreeMap<String, f64>,
}

fn parse_param(entry: &str) -> Result<(String, f64), UsageError> {
    let (k, v) = entry.split_once('=').ok_or_else(|| UsageError::new(PARAM, format!("expected name=value, got '{entry}'")))?;
    let k = k.trim();
    let v: f64 = v.trim().parse().map_err(|_| UsageError::new(PARAM, format!("'{}' is not a number", v.trim())))?;
    if k.is_empty() {
        return Err(UsageError::new(PARAM, format!("empty name in '{entry}'")));
    }
    Ok((k.to_string(), v))
}

/// Reads a config file into flag values and `param` entries.
pub fn read_config(path: &Path, keys: &[Key]) -> Result<(BTreeMap<String, String>, Vec<String>), UsageError> {
    let text = fs::read_to_string(path).map_err(|e| UsageError::new("config", format!("{}: {e}", path.display())))?;
    let mut vals = BTreeMap::new();
    let mut params = vec![];
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| UsageError::new("config", format!("line {}: expected key = value", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k == PARAM && keys.iter().any(|key| key.name == PARAM) {
            params.push(v.to_string());
        } else if !keys.iter().any(|key| key.name == k) {
            return Err(UsageError::new(k, "unknown key in config file"));
        } else if vals.insert(k.to_string(), v.to_string()).is_some() {
            return Err(UsageError::new(k, format!("line {}: key given twice", n + 1)));
        }
    }
    Ok((vals, params))
}

impl CommandSpec {
    /// Merges flags over config over defaults.
    pub fn resolve(
        subcommand: &str,
        keys: &[Key],
        flags: BTreeMap<String, String>,
        flag_params: Vec<String>,
        config: Option<&Path>,
    ) -> Result<Self, UsageError> {
        let (file, file_params) = match config {
            Some(p) => read_config(p, keys)?,
            None => Default::default(),
        };
        let mut parameters = BTreeMap::new();
        for k in keys {
            let v = flags.get(k.name).or_else(|| file.get(k.name)).cloned().or(k.default.map(str::to_string));
            if let Some(v) = v {
                parameters.insert(k.name.to_string(), v);
            }
        }
        let mut fixture_params = BTreeMap::new();
        for e in file_params {
            let (k, v) = parse_param(&e)?;
            fixture_params.insert(k, v);
        }
        for e in flag_params {
            let (k, v) = parse_param(&e)?;
            fixture_params.insert(k, v);
        }
        Ok(Self { subcommand: subcommand.to_string(), parameters, fixture_params })
    }

    pub fn has(&self, k: &str) -> bool {
        self.parameters.contains_key(k)
    }

    pub fn str(&self, k: &str) -> Result<&str, UsageError> {
        self.parameters.get(k).map(String::as_str).ok_or_else(|| UsageError::new(k, "required"))
    }

    pub fn f64(&self, k: &str) -> Result<f64, UsageError> {
        let s = self.str(k)?;
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(UsageError::new(k, format!("'{s}' is not a finite number"))),
        }
    }

    pub fn positive(&self, k: &str) -> Result<f64, UsageError> {
        let v = self.f64(k)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(UsageError::new(k, format!("must be positive, got {v}")))
        }
    }

    pub fn u64(&self, k: &str) -> Result<u64, UsageError> {
        let s = self.str(k)?;
        s.parse().map_err(|_| UsageError::new(k, format!("'{s}' is not a non-negative integer")))
    }

    pub fn point(&self, k: &str) -> Result<(f64, f64), UsageError> {
        let s = self.str(k)?;
        let v = numbers(k, s)?;
        match v[..] {
            [x, y] => Ok((x, y)),
            _ => Err(UsageError::new(k, format!("expected x,y, got '{s}'"))),
        }
    }

    /// `r` for `[-r, r]²` or `x0,x1,y0,y1`.
    pub fn window(&self, k: &str) -> Result<Window, UsageError> {
        let s = self.str(k)?;
        let v = numbers(k, s)?;
        let w = match v[..] {
            [r] if r > 0.0 => Ok(Window::square(r)),
            [x0, x1, y0, y1] => Window::new(x0, x1, y0, y1).map_err(|e| e.to_string()),
            _ => Err(format!("expected a positive half-width or x0,x1,y0,y1, got '{s}'")),
        };
        w.map_err(|m| UsageError::new(k, m))
    }

    pub fn opt_window(&self, k: &str) -> Result<Option<Window>, UsageError> {
        if self.has(k) {
            self.window(k).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn path(&self, k: &str) -> Result<PathBuf, UsageError> {
        Ok(PathBuf::from(self.str(k)?))
    }
}

fn numbers(k: &str, s: &str) -> Result<Vec<f64>, UsageError> {
    s.split(',')
        .map(|p| match p.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(UsageError::new(k, format!("'{}' is not a finite number", p.trim()))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEYS: &[Key] = &[key("tau", Some("0.5"), ""), key(PARAM, None, ""), key("h", Some("0.05"), ""), key("out", None, "")];

    fn flags(kv: &[(&str, &str)]) -> BTreeMap<String, String> {
        kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn flags_beat_config_beat_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(&cfg, "# comment\ntau = 0.25\nout = a\nparam = e=2\n").unwrap();
        let s = CommandSpec::resolve("x", KEYS, flags(&[("out", "b")]), vec!["e=3".into()], Some(&cfg)).unwrap();
        assert_eq!(s.str("tau").unwrap(), "0.25");
        assert_eq!(s.str("h").unwrap(), "0.05");
        assert_eq!(s.str("out").unwrap(), "b");
        assert_eq!(s.fixture_params["e"], 3.0);
    }

    #[test]
    fn unknown_config_key_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(&cfg, "tua = 1\n").unwrap();
        let e = CommandSpec::resolve("x", KEYS, flags(&[]), vec![], Some(&cfg)).unwrap_err();
        assert_eq!(e.key, "tua");
    }

    #[test]
    fn windows_and_points() {
        let s = CommandSpec::resolve("x", KEYS, flags(&[("out", "1,2,-1,0"), ("h", "3")]), vec![], None).unwrap();
        assert_eq!(s.window("out").unwrap(), Window::new(1.0, 2.0, -1.0, 0.0).unwrap());
        assert_eq!(s.window("h").unwrap(), Window::square(3.0));
        assert!(s.point("h").is_err());
        assert!(s.window("tau").is_ok());
        let bad = CommandSpec::resolve("x", KEYS, flags(&[("h", "nan")]), vec![], None).unwrap();
        assert_eq!(bad.positive("h").unwrap_err().key, "h");
    }
}
