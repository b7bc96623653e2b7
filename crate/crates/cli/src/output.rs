use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::args::Command;

/// Floats with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A header row plus string records, written to a file or stdout.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.header)?;
        for r in &self.rows {
            csv.write_record(r)?;
        }
        csv.flush()?;
        Ok(())
    }

    /// Writes to `out`, or stdout when `None`. Returns the file written, if any.
    pub fn emit(&self, out: Option<&Path>) -> Result<Option<PathBuf>> {
        match out {
            Some(p) => {
                let f = std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
                self.write_to(f)?;
                Ok(Some(p.to_path_buf()))
            }
            None => {
                self.write_to(std::io::stdout().lock())?;
                Ok(None)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub version: String,
    /// The command with every parameter resolved; replaying it regenerates the outputs.
    pub command: Command,
    pub outputs: Vec<PathBuf>,
    pub threads: usize,
    pub duration_seconds: f64,
    #[serde(default)]
    pub summary: serde_json::Value,
}

/// `run.csv` -> `run.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

impl Manifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }
}
