//! Run configuration: defaults, command-line flags, then an optional
//! `key = value` file, each overriding the previous layer.

use std::path::Path;

use dindex_core::{Aggregator, EligibilityRule, EngineConfig, TMax};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::Section;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecodeThreshold {
    Yearly,
    Final,
}

/// Analysis settings. Paths are kept out so that the fingerprint only
/// depends on what is computed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub header: bool,
    pub min_year: i32,
    pub max_year: i32,
    pub min_refs: u32,
    pub min_cites: u32,
    /// `None` sweeps every publication up to its own horizon.
    pub t_max: Option<u32>,
    pub nr_strictly_after: bool,
    pub recode_threshold: RecodeThreshold,
    /// Quantile of the highly disruptive thresholds; the recoded bottom
    /// scheme uses `1 - q`.
    pub q: f64,
    /// Window cap of the capped sign table.
    pub cap: u32,
    /// Final-D groups per sign for grouped correlations.
    pub bins: usize,
    #[serde(serialize_with = "ser_aggregators")]
    pub aggregators: Vec<Aggregator>,
    pub grid_refs: Vec<u32>,
    pub grid_cites: Vec<u32>,
    pub sections: Vec<Section>,
}

fn ser_aggregators<S: serde::Serializer>(a: &[Aggregator], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(a.iter().map(|a| a.name()))
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut aggregators = vec![Aggregator::Mean];
        aggregators.extend((1..=10).map(|k| Aggregator::Quantile(k as f64 / 10.0)));
        let grid = vec![1, 5, 10, 15, 20, 30];
        RunConfig {
            header: false,
            min_year: 0,
            max_year: 9999,
            min_refs: 5,
            min_cites: 5,
            t_max: None,
            nr_strictly_after: false,
            recode_threshold: RecodeThreshold::Yearly,
            q: 0.9,
            cap: 10,
            bins: 5,
            aggregators,
            grid_refs: grid.clone(),
            grid_cites: grid,
            sections: Section::ALL.to_vec(),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse(key, s)).collect()
}

impl RunConfig {
    pub fn rule(&self) -> EligibilityRule {
        EligibilityRule { min_refs: self.min_refs, min_cites: self.min_cites }
    }

    pub fn engine(&self) -> EngineConfig {
        EngineConfig { rule: self.rule(), nr_strictly_after: self.nr_strictly_after }
    }

    pub fn t_max(&self) -> TMax {
        self.t_max.map_or(TMax::Auto, TMax::Years)
    }

    /// Applies one setting given as text, as in the config file.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "header" => self.header = parse(key, value)?,
            "min_year" => self.min_year = parse(key, value)?,
            "max_year" => self.max_year = parse(key, value)?,
            "min_refs" => self.min_refs = parse(key, value)?,
            "min_cites" => self.min_cites = parse(key, value)?,
            "t_max" => self.t_max = if value == "auto" { None } else { Some(parse(key, value)?) },
            "nr_strictly_after" => self.nr_strictly_after = parse(key, value)?,
            "recode_threshold" => {
                self.recode_threshold = match value {
                    "yearly" => RecodeThreshold::Yearly,
                    "final" => RecodeThreshold::Final,
                    _ => return Err(Error::Config(format!("recode_threshold must be yearly or final, got {value:?}"))),
                }
            }
            "q" => self.q = parse(key, value)?,
            "cap" => self.cap = parse(key, value)?,
            "bins" => self.bins = parse(key, value)?,
            "aggregators" => {
                self.aggregators = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| Aggregator::parse(s).ok_or_else(|| Error::Config(format!("invalid aggregator {s:?}"))))
                    .collect::<Result<_>>()?
            }
            "grid_refs" => self.grid_refs = parse_list(key, value)?,
            "grid_cites" => self.grid_cites = parse_list(key, value)?,
            "sections" => self.sections = Section::parse_list(value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: k as u64 + 1,
                message: "expected key = value".into(),
            })?;
            self.set(key, value).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: k as u64 + 1,
                message: e.to_string(),
            })?;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::Config("q must lie in [0, 1]".into()));
        }
        if self.bins == 0 {
            return Err(Error::Config("bins must be at least 1".into()));
        }
        if self.min_year > self.max_year {
            return Err(Error::Config("min_year exceeds max_year".into()));
        }
        if self.grid_cites.contains(&0) {
            return Err(Error::Config("grid_cites entries must be at least 1".into()));
        }
        if self.aggregators.iter().any(|a| matches!(a, Aggregator::Quantile(q) if !(0.0..=1.0).contains(q))) {
            return Err(Error::Config("aggregator quantiles must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        crate::fsutil::sha256_bytes(serde_json::to_string(self).expect("config serializes").as_bytes())
    }
}
