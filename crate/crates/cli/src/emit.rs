//! CSV tables and the JSON summary.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::report::{RunReport, Table, TableKind};

/// Writes one CSV per task table, header-only files for table kinds with no
/// task, and `summary.json`. Returns the written paths in order.
pub fn emit_tables(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?;
    let mut written = Vec::new();
    for kind in TableKind::ALL {
        let tasks: Vec<_> = report
            .tasks
            .iter()
            .filter_map(|t| t.table.as_ref().filter(|tab| tab.kind() == kind).map(|tab| (t.name.as_str(), tab)))
            .collect();
        if tasks.is_empty() {
            let path = dir.join(format!("{}.csv", kind.file_stem()));
            write_table(&path, kind, None)?;
            written.push(path);
        }
        for (name, table) in tasks {
            let path = dir.join(format!("{name}.csv"));
            write_table(&path, kind, Some(table))?;
            written.push(path);
        }
    }
    let path = dir.join("summary.json");
    let mut json = serde_json::to_string_pretty(report).map_err(|e| CliError::Other(e.to_string()))?;
    json.push('\n');
    fs::write(&path, json).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
    written.push(path);
    Ok(written)
}

fn write_table(path: &Path, kind: TableKind, table: Option<&Table>) -> Result<(), CliError> {
    let csv_err = |e| CliError::Csv { path: path.to_path_buf(), source: e };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(kind.header()).map_err(csv_err)?;
    match table {
        None => {}
        Some(Table::Pressure(rows)) => {
            for &(n, l, s) in rows {
                w.serialize((n, l, s)).map_err(csv_err)?;
            }
        }
        Some(Table::Spectrum(rows)) => {
            for r in rows.iter().filter(|r| r.iter().all(|x| x.is_finite())) {
                w.serialize(r).map_err(csv_err)?;
            }
        }
        Some(Table::Correlation(rows)) => {
            for r in rows.iter().filter(|r| r.iter().all(|x| x.is_finite())) {
                w.serialize(r).map_err(csv_err)?;
            }
        }
    }
    w.flush().map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}
