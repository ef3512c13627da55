//! Output directory handling: atomic file writes, CSV formatting and the
//! run manifest.

use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Formats a float with 15 significant digits in a locale-free form.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0" in outputs
        return format!("{:.14e}", 0.0);
    }
    format!("{x:.14e}")
}

pub struct OutputDir {
    pub root: PathBuf,
    pub files: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(OutputDir { root: root.to_path_buf(), files: vec![] })
    }

    /// Writes `bytes` to `name` via a temporary file and a rename.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.root.join(name)).map_err(|e| e.error)?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        self.write(name, &bytes)
    }

    /// Writes the manifest last, listing every file written before it.
    pub fn write_manifest<T: Serialize>(&mut self, manifest: &T) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(manifest).map_err(std::io::Error::other)?;
        text.push('\n');
        self.write("manifest.json", text.as_bytes())
    }
}

/// `name.csv` for a single wavenumber, `name_k000.csv`, … for sweeps.
pub fn file_name(stem: &str, index: usize, sweep: bool) -> String {
    if sweep {
        format!("{stem}_k{index:03}.csv")
    } else {
        format!("{stem}.csv")
    }
}
