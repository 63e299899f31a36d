//! Sweep configuration: flat `key = v1, v2, …` text merged with command-line
//! flags. Every key holds a grid; the sweep is the Cartesian product.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!(
                "format must be csv or json, got '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Int,
    Float,
    Text,
}

/// Recognised grid keys. Flags spelled with `-` map to `_`.
const KEYS: &[(&str, Kind)] = &[
    ("m", Kind::Int),
    ("lambda", Kind::Float),
    ("alpha", Kind::Float),
    ("theta", Kind::Float),
    ("t", Kind::Float),
    ("n", Kind::Int),
    ("dim", Kind::Int),
    ("N0", Kind::Float),
    ("A", Kind::Float),
    ("v0", Kind::Float),
    ("t_end", Kind::Float),
    ("dt", Kind::Float),
    ("stride", Kind::Int),
    ("order", Kind::Int),
    ("lambda_prime", Kind::Float),
    ("family", Kind::Text),
    ("N", Kind::Int),
    ("p", Kind::Float),
    ("W", Kind::Int),
    ("q", Kind::Float),
];

fn kind_of(key: &str) -> Option<Kind> {
    KEYS.iter().find(|(k, _)| *k == key).map(|(_, kind)| *kind)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepConfig {
    grids: BTreeMap<String, Vec<String>>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    /// Parses the flat config text; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    /// Sets one key from its textual value; later calls override earlier ones.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.replace('-', "_");
        match key.as_str() {
            "format" => {
                self.format = value.parse()?;
                return Ok(());
            }
            "out" => {
                self.out = Some(PathBuf::from(value));
                return Ok(());
            }
            _ => {}
        }
        let kind = kind_of(&key).ok_or_else(|| CliError::Config(format!("unknown key '{key}'")))?;
        let items: Vec<String> = value.split(',').map(|s| s.trim().to_string()).collect();
        if items.iter().any(|s| s.is_empty()) {
            return Err(CliError::Config(format!(
                "key '{key}': empty grid entry in '{value}'"
            )));
        }
        for s in &items {
            match kind {
                Kind::Int => {
                    s.parse::<i64>().map_err(|_| {
                        CliError::Config(format!("key '{key}': '{s}' is not an integer"))
                    })?;
                }
                Kind::Float => {
                    let x: f64 = s.parse().map_err(|_| {
                        CliError::Config(format!("key '{key}': '{s}' is not a number"))
                    })?;
                    if !x.is_finite() {
                        return Err(CliError::Config(format!(
                            "key '{key}': '{s}' is not finite"
                        )));
                    }
                }
                Kind::Text => {}
            }
        }
        self.grids.insert(key, items);
        Ok(())
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.grids.contains_key(key)
    }

    /// Rejects keys the subcommand does not read.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for k in self.grids.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(CliError::Config(format!(
                    "key '{k}' is not used by this subcommand (accepted: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn floats(&self, key: &str, default: &[f64]) -> Vec<f64> {
        match self.grids.get(key) {
            Some(v) => v
                .iter()
                .map(|s| s.parse().expect("validated on set"))
                .collect(),
            None => default.to_vec(),
        }
    }

    pub fn ints(&self, key: &str, default: &[i64]) -> Vec<i64> {
        match self.grids.get(key) {
            Some(v) => v
                .iter()
                .map(|s| s.parse().expect("validated on set"))
                .collect(),
            None => default.to_vec(),
        }
    }

    /// Non-negative integer grid.
    pub fn uints(&self, key: &str, default: &[u32]) -> Result<Vec<u32>, CliError> {
        match self.grids.get(key) {
            Some(_) => self
                .ints(key, &[])
                .into_iter()
                .map(|i| {
                    u32::try_from(i)
                        .map_err(|_| CliError::Config(format!("key '{key}' must be >= 0, got {i}")))
                })
                .collect(),
            None => Ok(default.to_vec()),
        }
    }

    pub fn texts(&self, key: &str, default: &[&str]) -> Vec<String> {
        match self.grids.get(key) {
            Some(v) => v.clone(),
            None => default.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Explicitly set keys as `(key, "v1,v2")`, sorted by key.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .grids
            .iter()
            .map(|(k, v)| (k.clone(), v.join(",")))
            .collect();
        out.push((
            "format".into(),
            match self.format {
                Format::Csv => "csv".into(),
                Format::Json => "json".into(),
            },
        ));
        out
    }
}

/// Cartesian product of index ranges, last axis fastest.
pub fn product(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in sizes {
        let mut next = Vec::with_capacity(out.len() * n);
        for prefix in &out {
            for i in 0..n {
                let mut p = prefix.clone();
                p.push(i);
                next.push(p);
            }
        }
        out = next;
    }
    out
}
