//! Tabular output helpers: fixed 12-significant-digit numeric formatting,
//! whole-file atomic writes, and the header-aware reader used for file
//! ingestion.

use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Format with 12 significant digits. All numeric table and report values
/// go through this so file round-trips preserve test tolerances.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Write the whole file atomically: a hidden sibling gets the bytes, then a
/// rename moves it into place.
pub fn write_atomic(path: &Path, content: &str) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
    }
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Numeric(format!("not a file path: {}", path.display())))?;
    let mut tmp = PathBuf::from(path);
    tmp.set_file_name(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// A parsed tabular file: header names plus numeric rows.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn read(path: &Path) -> CliResult<Table> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Numeric(format!("cannot read {}: {e}", path.display())))?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header_line = lines
            .next()
            .ok_or_else(|| CliError::Numeric(format!("{}: empty file", path.display())))?;
        let header: Vec<String> = header_line.split('\t').map(str::to_owned).collect();
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let mut row = Vec::with_capacity(header.len());
            for field in line.split('\t') {
                let value: f64 = field.trim().parse().map_err(|_| {
                    CliError::Numeric(format!(
                        "{}, data row {}: not a number: {field:?}",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                row.push(value);
            }
            if row.len() != header.len() {
                return Err(CliError::Numeric(format!(
                    "{}, data row {}: {} fields, header has {}",
                    path.display(),
                    lineno + 1,
                    row.len(),
                    header.len()
                )));
            }
            rows.push(row);
        }
        Ok(Table { header, rows })
    }

    /// Values of the named column, top to bottom.
    pub fn column(&self, name: &str, path: &Path) -> CliResult<Vec<f64>> {
        let idx = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| {
                CliError::Numeric(format!(
                    "{}: no column named {name:?} (have: {})",
                    path.display(),
                    self.header.join(", ")
                ))
            })?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }
}
