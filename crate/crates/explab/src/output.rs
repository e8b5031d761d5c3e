use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::plot::LinePlot;
use crate::RunError;

/// A CSV table built row by row.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    fn to_bytes(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

/// Builds a CSV row from displayable cells.
#[macro_export]
macro_rules! row {
    ($($cell:expr),* $(,)?) => {
        vec![$($cell.to_string()),*]
    };
}

#[derive(Debug, Clone, Serialize)]
pub struct EmittedFile {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Collects artifacts and assertions for one run; all writes happen on the calling thread.
pub struct RunOutput {
    dir: PathBuf,
    plot: bool,
    files: Vec<EmittedFile>,
    checks: Vec<Check>,
}

impl RunOutput {
    pub fn new(dir: &Path, plot: bool) -> Result<Self, RunError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            plot,
            files: Vec::new(),
            checks: Vec::new(),
        })
    }

    fn emit(&mut self, name: &str, bytes: &[u8]) -> Result<(), RunError> {
        fs::write(self.dir.join(name), bytes)?;
        self.files.push(EmittedFile {
            path: name.to_string(),
            bytes: bytes.len(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> Result<(), RunError> {
        let bytes = table
            .to_bytes()
            .map_err(|e| RunError::Output(e.to_string()))?;
        self.emit(&format!("{name}.csv"), &bytes)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), RunError> {
        let mut bytes =
            serde_json::to_vec_pretty(value).map_err(|e| RunError::Output(e.to_string()))?;
        bytes.push(b'\n');
        self.emit(&format!("{name}.json"), &bytes)
    }

    /// Writes `name.svg` when plotting is enabled.
    pub fn plot(&mut self, name: &str, plot: &LinePlot) -> Result<(), RunError> {
        if self.plot {
            self.emit(&format!("{name}.svg"), plot.render().as_bytes())?;
        }
        Ok(())
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn files(&self) -> &[EmittedFile] {
        &self.files
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub entlab: &'static str,
    pub entlab_core: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest<C: Serialize> {
    pub experiment: String,
    pub passed: bool,
    pub config: C,
    pub versions: Versions,
    pub wall_clock_seconds: f64,
    pub files: Vec<EmittedFile>,
    pub checks: Vec<Check>,
}

impl<C: Serialize> RunManifest<C> {
    pub fn write(&self, dir: &Path) -> Result<(), RunError> {
        let mut bytes =
            serde_json::to_vec_pretty(self).map_err(|e| RunError::Output(e.to_string()))?;
        bytes.push(b'\n');
        fs::write(dir.join("manifest.json"), bytes)?;
        Ok(())
    }
}

/// Fixed-precision formatting for derived columns.
pub fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_serializes_header_and_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.push(row![1, fmt(0.5)]);
        assert_eq!(
            String::from_utf8(t.to_bytes().unwrap()).unwrap(),
            "a,b\n1,5.000000000000e-1\n"
        );
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn ragged_rows_panic() {
        Table::new(&["a"]).push(row![1, 2]);
    }
}
