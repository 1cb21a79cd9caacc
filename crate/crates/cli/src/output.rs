//! Output directory handling: CSV/JSON tables and the run manifest.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Columns of `f64` rows plus a key/value header.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<(String, String)>, columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Self {
            header,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (k, v) in &self.header {
            writeln!(w, "# {k} = {v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.10e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    fn to_json(&self) -> Value {
        let header: serde_json::Map<String, Value> = self
            .header
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        json!({ "header": header, "columns": self.columns, "rows": self.rows })
    }
}

/// Collects the files written by one command and records them in `manifest.json`.
pub struct Output {
    dir: PathBuf,
    format: Format,
    command: &'static str,
    files: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path, format: Format, command: &'static str) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            command,
            files: Vec::new(),
        })
    }

    pub fn write_with<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        f(&mut w)
            .and_then(|_| w.flush())
            .with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        self.write_with(name, |w| writeln!(w, "{text}"))
    }

    /// Writes `<stem>.csv` or `<stem>.json` depending on the selected format.
    pub fn table(&mut self, stem: &str, table: &Table) -> Result<()> {
        match self.format {
            Format::Csv => self.write_with(&format!("{stem}.csv"), |w| table.write_csv(w)),
            Format::Json => self.json(&format!("{stem}.json"), &table.to_json()),
        }
    }

    pub fn finish(mut self, extra: Value) -> Result<()> {
        let files = std::mem::take(&mut self.files);
        let manifest = json!({
            "tool": "wva-sql",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "format": self.format,
            "files": files,
            "run": extra,
        });
        self.json("manifest.json", &manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let t = Table::new(vec![("r_s".into(), "1e0".into())], &["I", "Rs2"], vec![vec![1.0, 0.5]]);
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "# r_s = 1e0\nI,Rs2\n1.0000000000e0,5.0000000000e-1\n"
        );
    }
}
