use std::fs;
use std::path::Path;

use qavg_core::bounds::BoundReport;

use crate::CliError;

/// Files produced by one command, held in memory until every cell is done.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn add_reports(&mut self, name: &str, reports: &[BoundReport]) -> Result<(), CliError> {
        let mut buf = Vec::new();
        BoundReport::write_csv(reports, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
        self.add(name, buf);
        Ok(())
    }

    pub fn add_rows(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.add(name, bytes);
        Ok(())
    }

    /// Writes each file to a temporary sibling and renames it into place.
    pub fn commit(self, dir: &Path) -> Result<Vec<String>, CliError> {
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        let mut written = Vec::new();
        for (name, bytes) in self.files {
            let target = dir.join(&name);
            let tmp = dir.join(format!(".{name}.tmp"));
            fs::write(&tmp, &bytes).map_err(io)?;
            fs::rename(&tmp, &target).map_err(io)?;
            written.push(target.display().to_string());
        }
        Ok(written)
    }
}
