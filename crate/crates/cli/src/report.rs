//! TOML reports: one record per check.

use std::path::Path;

use opinion_merge_core::verify::CheckReport;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub name: String,
    pub pass: bool,
    pub max_violation: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    /// What produced the report, e.g. `verify suite=all seed=42`.
    pub source: String,
    pub pass: bool,
    #[serde(default, rename = "check")]
    pub checks: Vec<ReportEntry>,
}

impl ReportFile {
    pub fn new(source: impl Into<String>, reports: &[CheckReport]) -> Self {
        let checks: Vec<ReportEntry> = reports
            .iter()
            .map(|r| ReportEntry {
                name: r.name.clone(),
                pass: r.pass,
                max_violation: r.max_violation,
                tolerance: r.tolerance,
            })
            .collect();
        ReportFile { source: source.into(), pass: checks.iter().all(|c| c.pass), checks }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report is plain data")
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_toml())
    }
}
