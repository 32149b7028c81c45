//! Dataset writer: one file per table, plus `meta.json` and the resolved
//! `config.txt` that reproduces the run.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Serialize)]
struct Meta<'a> {
    command: &'a str,
    version: &'a str,
    seed: Option<u64>,
    format: Format,
    config: &'a std::collections::BTreeMap<String, String>,
    started_unix: f64,
    finished_unix: f64,
    files: &'a [String],
}

pub struct Output {
    dir: PathBuf,
    format: Format,
    files: Vec<String>,
    started: f64,
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

impl Output {
    pub fn new(dir: &Path, format: Format) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), format, files: Vec::new(), started: now() })
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    fn flush(&self, mut w: BufWriter<File>, name: &str) -> Result<()> {
        w.flush().map_err(|e| CliError::io(self.dir.join(name), e))
    }

    /// Rows as `<name>.csv` (header from field names) or a `<name>.json` array.
    pub fn table<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<()> {
        match self.format {
            Format::Csv => {
                let file = format!("{name}.csv");
                let w = self.create(&file)?;
                let mut csv = csv::Writer::from_writer(w);
                for r in rows {
                    csv.serialize(r)?;
                }
                let w = csv.into_inner().map_err(|e| CliError::io(self.dir.join(&file), e.into_error()))?;
                self.flush(w, &file)
            }
            Format::Json => self.json(name, &rows),
        }
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let file = format!("{name}.json");
        let mut w = self.create(&file)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n").map_err(|e| CliError::io(self.dir.join(&file), e))?;
        self.flush(w, &file)
    }

    pub fn finish(mut self, command: &str, seed: Option<u64>, config: &RunConfig) -> Result<()> {
        let mut w = self.create("config.txt")?;
        w.write_all(config.render().as_bytes()).map_err(|e| CliError::io(self.dir.join("config.txt"), e))?;
        self.flush(w, "config.txt")?;
        self.files.push("meta.json".into());
        let meta = Meta {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            format: self.format,
            config: config.values(),
            started_unix: self.started,
            finished_unix: now(),
            files: &self.files,
        };
        let path = self.dir.join("meta.json");
        let f = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(f);
        serde_json::to_writer_pretty(&mut w, &meta)?;
        w.write_all(b"\n").map_err(|e| CliError::io(&path, e))?;
        self.flush(w, "meta.json")
    }
}
