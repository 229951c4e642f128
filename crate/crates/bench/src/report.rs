//! Pass/fail checks and JSON reports with sorted keys.

use std::collections::BTreeMap;
use std::path::Path;

use hasimoto_core::grid::Grid;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Command, ExperimentConfig, Tolerances};
use crate::error::{BenchError, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `"<="` or `">="`.
    pub comparison: &'static str,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            comparison: "<=",
            passed: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            comparison: ">=",
            passed: value >= threshold,
        }
    }

    /// A boolean condition, recorded as 1 (true) or 0 against 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} = {:.3e} {} {:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.comparison,
            self.threshold
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub passed: bool,
    pub config_hash: String,
    pub grid: Grid,
    pub tolerances: Tolerances,
    pub versions: BTreeMap<&'static str, &'static str>,
    pub checks: Vec<Check>,
    pub details: Value,
}

impl Report {
    pub fn new(command: Command, config: &ExperimentConfig, checks: Vec<Check>, details: impl Serialize) -> Result<Self> {
        let details = serde_json::to_value(details).map_err(|e| BenchError::Config(format!("report details: {e}")))?;
        Ok(Self {
            command: command.name(),
            passed: checks.iter().all(|c| c.passed),
            config_hash: config.hash(),
            grid: config.grid,
            tolerances: config.tolerances,
            versions: BTreeMap::from([
                ("hasimoto-core", hasimoto_core::VERSION),
                ("hasimoto-bench", env!("CARGO_PKG_VERSION")),
            ]),
            checks,
            details,
        })
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Pretty JSON with keys sorted at every level.
    pub fn to_json(&self) -> String {
        to_stable_json(self)
    }

    pub fn write(&self, dir: &Path) -> Result<std::path::PathBuf> {
        let path = dir.join(format!("{}_report.json", self.command));
        write_text(&path, &self.to_json())?;
        Ok(path)
    }
}

pub fn to_stable_json(value: &impl Serialize) -> String {
    // serde_json's map type is ordered by key, so routing through `Value`
    // sorts every object.
    let v = serde_json::to_value(value).expect("serializable report");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable report");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| BenchError::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| BenchError::io(path, e))
}
