use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::{Format, GlobalArgs};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) => {
                serde_json::Number::from_f64(*v).map_or(serde_json::Value::Null, Into::into)
            }
            Cell::Int(v) => (*v).into(),
            Cell::Text(s) => s.clone().into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// A rectangular result table written as CSV or as a JSON array of objects.
#[derive(Debug, Clone)]
pub struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write(&self, mut w: impl Write, format: Format) -> Result<(), CliError> {
        match format {
            Format::Csv => {
                let mut out = csv::Writer::from_writer(w);
                out.write_record(&self.headers)?;
                for r in &self.rows {
                    out.write_record(r.iter().map(Cell::csv))?;
                }
                out.flush()?;
            }
            Format::Json => {
                let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
                    .rows
                    .iter()
                    .map(|r| {
                        self.headers
                            .iter()
                            .zip(r)
                            .map(|(h, c)| (h.to_string(), c.json()))
                            .collect()
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut w, &rows)?;
                writeln!(w)?;
            }
        }
        Ok(())
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Loads `--config` into `T`, or `T::default()` without one.
pub fn load_config<T>(global: &GlobalArgs) -> Result<T, CliError>
where
    T: serde::de::DeserializeOwned + Default,
{
    match &global.config {
        Some(p) => read_json(p),
        None => Ok(T::default()),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Provenance record written next to every output artifact.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub version: String,
    pub input_digests: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    /// RFC 3339; taken from `SOURCE_DATE_EPOCH` when set.
    pub timestamp: String,
}

/// Collects output files for one run and writes them with a manifest.
pub struct OutputSink {
    dir: Option<PathBuf>,
    format: Format,
    command: String,
    config_hash: String,
    seed: Option<u64>,
    inputs: BTreeMap<String, String>,
    outputs: Vec<String>,
}

impl OutputSink {
    /// `stdout_fallback` commands print tables when no directory is given.
    pub fn new(
        global: &GlobalArgs,
        command: &str,
        effective_config: &impl Serialize,
        seed: Option<u64>,
        stdout_fallback: bool,
    ) -> Result<Self, CliError> {
        let dir = match &global.output_dir {
            Some(d) => Some(d.clone()),
            None if stdout_fallback => None,
            None => Some(PathBuf::from(".")),
        };
        if let Some(d) = &dir {
            std::fs::create_dir_all(d)
                .map_err(|e| CliError::Validation(format!("{}: {e}", d.display())))?;
        }
        let config_json = serde_json::to_vec(effective_config)?;
        Ok(Self {
            dir,
            format: global.format,
            command: command.to_string(),
            config_hash: sha256_hex(&config_json),
            seed,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        })
    }

    pub fn record_input(&mut self, path: &Path) -> Result<(), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        self.inputs
            .insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(())
    }

    /// Writes `table` as `<stem>.<ext>`, or to stdout without a directory.
    pub fn table(&mut self, stem: &str, table: &Table) -> Result<(), CliError> {
        match &self.dir {
            Some(d) => {
                let name = format!("{stem}.{}", self.format.extension());
                let file = std::fs::File::create(d.join(&name))?;
                table.write(std::io::BufWriter::new(file), self.format)?;
                self.outputs.push(name);
            }
            None => table.write(std::io::stdout().lock(), self.format)?,
        }
        Ok(())
    }

    /// Writes a secondary table (rejects, diagnostics); skipped without a
    /// directory so stdout carries only the main table.
    pub fn aux_table(&mut self, stem: &str, table: &Table) -> Result<(), CliError> {
        if self.dir.is_some() {
            self.table(stem, table)?;
        }
        Ok(())
    }

    /// Writes a JSON document; skipped without a directory.
    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        if let Some(d) = &self.dir {
            let file = std::fs::File::create(d.join(name))?;
            let mut w = std::io::BufWriter::new(file);
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
            self.outputs.push(name.to_string());
        }
        Ok(())
    }

    pub fn finish(self) -> Result<(), CliError> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.parse::<i64>().ok())
            .and_then(|s| chrono::DateTime::from_timestamp(s, 0))
            .unwrap_or_else(chrono::Utc::now)
            .to_rfc3339();
        let manifest = RunManifest {
            command: self.command,
            config_hash: self.config_hash,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_digests: self.inputs,
            outputs: self.outputs,
            timestamp,
        };
        let file = std::fs::File::create(dir.join("manifest.json"))?;
        let mut w = std::io::BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        writeln!(w)?;
        Ok(())
    }
}
