//! Run directory: CSV record batches, one JSON summary and a manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use walklab_core::stats::TestReport;

use crate::error::CliResult;

pub struct RunOutput {
    dir: PathBuf,
    batch_rows: usize,
    files: Vec<String>,
    started: Instant,
}

impl RunOutput {
    pub fn create(dir: &Path, batch_rows: usize) -> CliResult<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), batch_rows: batch_rows.max(1), files: Vec::new(), started: Instant::now() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn write_csv<I, R>(&mut self, name: String, header: &[&str], rows: I) -> CliResult<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator,
        R::Item: AsRef<[u8]>,
    {
        let mut w = csv::Writer::from_path(self.dir.join(&name))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        self.files.push(name);
        Ok(())
    }

    /// Writes `rows` as `stem_0000.csv`, `stem_0001.csv`, … of at most `batch_rows` records.
    pub fn batches(&mut self, stem: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        if rows.is_empty() {
            return self.write_csv(format!("{stem}_0000.csv"), header, std::iter::empty::<Vec<String>>());
        }
        for (k, chunk) in rows.chunks(self.batch_rows).enumerate() {
            self.write_csv(format!("{stem}_{k:04}.csv"), header, chunk.iter().cloned())?;
        }
        Ok(())
    }

    pub fn reports(&mut self, name: &str, reports: &[TestReport]) -> CliResult<()> {
        self.write_csv(format!("{name}.csv"), &TestReport::CSV_HEADER, reports.iter().map(|r| r.csv_record()))
    }

    pub fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        self.write_csv(format!("{name}.csv"), header, rows.iter().cloned())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let file = format!("{name}.json");
        std::fs::write(self.dir.join(&file), serde_json::to_string_pretty(value)?)?;
        self.files.push(file);
        Ok(())
    }

    /// Writes `manifest.json`; called last so the file list is complete.
    pub fn manifest(&mut self, command: &str, config: &Value, seed: u64, workers: usize) -> CliResult<()> {
        let manifest = json!({
            "command": command,
            "config": config,
            "seed": seed,
            "workers": workers,
            "versions": {
                "walklab-cli": env!("CARGO_PKG_VERSION"),
                "walklab-core": walklab_core::VERSION,
            },
            "wall_seconds": self.started.elapsed().as_secs_f64(),
            "files": self.files,
        });
        std::fs::write(self.dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }
}

/// Shortest round-trip decimal form, stable across platforms.
pub fn num(x: f64) -> String {
    format!("{x}")
}
