//! Deterministic result persistence: flat tables and run manifests.
//!
//! Every experiment writes its tables with fixed column order and
//! shortest-round-trip float formatting, so identical configs and seeds
//! produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Formats a float for tables: shortest representation that round-trips.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Writes a comma-separated table with a header row.
pub fn write_table<P: AsRef<Path>>(path: P, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Captures what produced a run's outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub master_seed: u64,
    pub build: String,
    /// Wall-clock seconds; informational only, excluded from determinism
    /// comparisons.
    pub elapsed_secs: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, master_seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            config,
            master_seed,
            build: format!("eqsearch {}", env!("CARGO_PKG_VERSION")),
            elapsed_secs: 0.0,
        }
    }

    pub fn write<P: AsRef<Path>>(&self, dir: P) -> Result<PathBuf> {
        fs::create_dir_all(&dir)?;
        let path = dir.as_ref().join("run_manifest.json");
        let mut file = fs::File::create(&path)?;
        writeln!(file, "{}", serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_byte_stable() {
        let dir = std::env::temp_dir().join("eqsearch_output_test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.csv");
        let rows = vec![vec!["1".into(), fmt_f64(0.25)], vec!["2".into(), fmt_f64(1.0 / 3.0)]];
        write_table(&path, &["id", "value"], &rows).unwrap();
        let first = fs::read(&path).unwrap();
        write_table(&path, &["id", "value"], &rows).unwrap();
        assert_eq!(first, fs::read(&path).unwrap());
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with("id,value\n1,0.25\n"));
    }
}
