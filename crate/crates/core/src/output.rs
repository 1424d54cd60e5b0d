//! CSV and JSON formats written by the command line.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::ScanTable;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "1";

/// Column contract shared by every CSV the CLI writes.
pub const CSV_HEADER: &str = "param,U,Uprime,Udoubleprime,V,absPhi,absPhiTilde,absOmega,Pik,nbar";

/// JSON wrapper around every CLI result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEnvelope {
    pub schema_version: String,
    pub command: String,
    pub parameters: Value,
    pub payload: Value,
    pub notes: Vec<String>,
}

impl OutputEnvelope {
    pub fn new(
        command: &str,
        parameters: &impl Serialize,
        payload: &impl Serialize,
        notes: Vec<String>,
    ) -> Result<Self> {
        Ok(Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            parameters: to_value(parameters)?,
            payload: to_value(payload)?,
            notes,
        })
    }

    /// Pretty JSON followed by a newline.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Io(e.to_string()))
    }
}

fn to_value(x: &impl Serialize) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Io(e.to_string()))
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// The table as CSV with LF line endings.
pub fn csv_string(table: &ScanTable) -> String {
    let mut out = String::with_capacity(64 + table.rows.len() * 240);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &table.rows {
        let cells = [
            r.param,
            r.u,
            r.u_prime,
            r.u_double_prime,
            r.v,
            r.abs_phi,
            r.abs_phi_tilde,
            r.abs_omega,
            r.pi_k,
            r.nbar,
        ];
        let line: Vec<String> = cells.iter().map(|&x| fmt17(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Writes `contents` to a temporary file next to `path`, then renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}
