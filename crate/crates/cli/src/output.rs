//! Output directory whose files are removed again unless the run commits.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub struct OutputDir {
    root: PathBuf,
    created_root: bool,
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        let created_root = !root.exists();
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            created_root,
            written: Vec::new(),
            committed: false,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        self.written.push(path.clone());
        fs::write(&path, contents)?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn write_csv(&mut self, name: &str, header: &[String], rows: &[Vec<Option<f64>>]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        self.written.push(path.clone());
        let mut w = csv::Writer::from_path(&path).map_err(io_error)?;
        w.write_record(header).map_err(io_error)?;
        for row in rows {
            w.write_record(row.iter().map(|v| v.map(format_number).unwrap_or_default()))
                .map_err(io_error)?;
        }
        w.flush()?;
        Ok(path)
    }

    /// Keeps everything written so far.
    pub fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for OutputDir {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
        if self.created_root {
            let _ = fs::remove_dir(&self.root);
        }
    }
}

fn io_error(e: csv::Error) -> std::io::Error {
    e.into()
}

/// Scientific notation with 16 significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.15e}")
}
