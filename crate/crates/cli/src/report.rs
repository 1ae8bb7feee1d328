//! CSV and JSON result files.
//!
//! Every JSON document has the shape
//! `{"schema_version": 1, "command": .., "config": .., "results": ..}`.
//! Floats are written in shortest round-trip form, so reruns with the same
//! inputs produce byte-identical files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Document<'a, C: Serialize, R: Serialize> {
    schema_version: u32,
    command: &'a str,
    config: &'a C,
    results: &'a R,
}

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|source| CliError::Write { path: root.into(), source })?;
        Ok(OutputDir { root: root.into() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let path = self.path(name);
        let write_err = |e: csv::Error| CliError::Write { path: path.clone(), source: e.into() };
        let mut writer = csv::Writer::from_path(&path).map_err(write_err)?;
        writer.write_record(header).map_err(write_err)?;
        for row in rows {
            writer.write_record(row).map_err(write_err)?;
        }
        writer.flush().map_err(|source| CliError::Write { path: path.clone(), source })?;
        Ok(path)
    }

    pub fn write_json<C: Serialize, R: Serialize>(
        &self,
        name: &str,
        command: &str,
        config: &C,
        results: &R,
    ) -> Result<PathBuf> {
        let path = self.path(name);
        let write_err = |source| CliError::Write { path: path.clone(), source };
        let mut out = BufWriter::new(File::create(&path).map_err(write_err)?);
        let doc = Document { schema_version: SCHEMA_VERSION, command, config, results };
        serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| write_err(e.into()))?;
        out.write_all(b"\n").map_err(write_err)?;
        out.flush().map_err(write_err)?;
        Ok(path)
    }
}

/// Shortest round-trip decimal form.
pub fn num(value: f64) -> String {
    format!("{value}")
}
