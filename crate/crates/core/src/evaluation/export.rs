use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::math::Matrix;
use crate::model::StidParams;

fn table_csv(table: &Matrix) -> String {
    let mut out = String::from("index");
    for d in 0..table.cols() {
        out.push_str(&format!(",dim_{d}"));
    }
    out.push('\n');
    for r in 0..table.rows() {
        out.push_str(&r.to_string());
        for v in table.row(r) {
            out.push_str(&format!(",{v:?}"));
        }
        out.push('\n');
    }
    out
}

/// Writes each enabled identity table as `E.csv`, `T_tid.csv` and
/// `T_diw.csv` (one row per table row, index first). Disabled tables are
/// skipped. Returns the written paths.
pub fn export_embeddings(params: &StidParams, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let tables = [
        ("E.csv", &params.spatial),
        ("T_tid.csv", &params.time_of_day),
        ("T_diw.csv", &params.day_of_week),
    ];
    let mut written = Vec::new();
    for (name, table) in tables {
        let Some(table) = table else { continue };
        let path = out_dir.join(name);
        fs::write(&path, table_csv(table)).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
