//! Report documents: deterministic CSV and JSON renderings with embedded
//! metadata and the per-grid constants ledger.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use owtf_core::report::{config_hash, ConstantsLedger};
use owtf_core::Result;
use serde::Serialize;

pub const TOOL: &str = "owtf";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Metadata stamped on every report.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub constants: ConstantsLedger,
}

impl Meta {
    pub fn new(command: &str, canonical_config: &str, n: usize, seed: Option<u64>) -> Meta {
        Meta {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            config_hash: format!("{:016x}", config_hash(canonical_config)),
            n,
            seed,
            constants: ConstantsLedger::for_side(n),
        }
    }

    /// Append the metadata comment block used by the CSV renderings.
    pub fn csv_comments_into(&self, out: &mut String) {
        out.push_str(&format!("# tool,{}\n", self.tool));
        out.push_str(&format!("# version,{}\n", self.version));
        out.push_str(&format!("# command,{}\n", self.command));
        out.push_str(&format!("# config_hash,{}\n", self.config_hash));
        out.push_str(&format!("# n,{}\n", self.n));
        if let Some(seed) = self.seed {
            out.push_str(&format!("# seed,{seed}\n"));
        }
        let constants = serde_json::to_value(self.constants).expect("constants ledger serializes");
        for (name, value) in constants.as_object().expect("ledger is an object") {
            out.push_str(&format!("# constant,{name},{value}\n"));
        }
    }
}

/// A named quantity; tolerance and verdict are present for asserted
/// identities and absent for purely informational values.
#[derive(Debug, Clone, Serialize)]
pub struct ValueRow {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

impl ValueRow {
    pub fn info(name: &str, value: f64) -> ValueRow {
        ValueRow {
            name: name.to_string(),
            value,
            tolerance: None,
            pass: None,
        }
    }

    pub fn check(name: &str, residual: f64, tolerance: f64) -> ValueRow {
        ValueRow {
            name: name.to_string(),
            value: residual,
            tolerance: Some(tolerance),
            pass: Some(residual.abs() <= tolerance),
        }
    }
}

/// Report of named quantities; exits green only when every asserted row
/// passed.
#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    #[serde(flatten)]
    pub meta: Meta,
    pub rows: Vec<ValueRow>,
    pub passed: bool,
}

impl TableReport {
    pub fn new(meta: Meta, rows: Vec<ValueRow>) -> TableReport {
        let passed = rows.iter().all(|r| r.pass.unwrap_or(true));
        TableReport { meta, rows, passed }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        self.meta.csv_comments_into(&mut out);
        out.push_str(&format!("# passed,{}\n", self.passed));
        out.push_str("name,value,tolerance,pass\n");
        for row in &self.rows {
            let tolerance = row.tolerance.map(|t| t.to_string()).unwrap_or_default();
            let pass = row
                .pass
                .map(|p| if p { "pass" } else { "fail" }.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.name, row.value, tolerance, pass
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// One phase-space sample in a grid report.
#[derive(Debug, Clone, Serialize)]
pub struct GridRow {
    pub time: usize,
    pub freq: usize,
    pub values: Vec<f64>,
}

/// Heat-map style report: per-point columns, plus optional check rows.
#[derive(Debug, Clone, Serialize)]
pub struct GridReport {
    #[serde(flatten)]
    pub meta: Meta,
    pub columns: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<ValueRow>,
    pub rows: Vec<GridRow>,
}

impl GridReport {
    pub fn new(meta: Meta, columns: &[&str], rows: Vec<GridRow>, checks: Vec<ValueRow>) -> Self {
        GridReport {
            meta,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            checks,
            rows,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|r| r.pass.unwrap_or(true))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        self.meta.csv_comments_into(&mut out);
        for row in &self.checks {
            let tolerance = row.tolerance.map(|t| t.to_string()).unwrap_or_default();
            let pass = row
                .pass
                .map(|p| if p { "pass" } else { "fail" }.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "# check,{},{},{},{}\n",
                row.name, row.value, tolerance, pass
            ));
        }
        out.push_str("time,freq");
        for column in &self.columns {
            out.push(',');
            out.push_str(column);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{},{}", row.time, row.freq));
            for value in &row.values {
                out.push_str(&format!(",{value}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// Write the rendered report to the chosen sink.
pub fn emit(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, content),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes()).map_err(Into::into)
        }
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(Into::into)
}
