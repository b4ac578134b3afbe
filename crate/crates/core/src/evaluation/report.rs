use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::evaluation::{metrics, Metrics};
use crate::math::Matrix;

/// Horizons reported individually, when the forecast is long enough.
pub const REPORT_HORIZONS: [usize; 3] = [3, 6, 12];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizonLabel {
    /// The k-th future step, 1-based.
    Step(usize),
    Average,
}

impl fmt::Display for HorizonLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HorizonLabel::Step(k) => write!(f, "@{k}"),
            HorizonLabel::Average => f.write_str("avg"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonRow {
    pub label: HorizonLabel,
    /// `None` for a step whose entries are all masked out.
    pub metrics: Option<Metrics>,
    pub masked_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonReport {
    pub rows: Vec<HorizonRow>,
    pub mape_floor: f64,
}

fn column(m: &Matrix, k: usize) -> Vec<f64> {
    (0..m.rows()).map(|r| m.get(r, k)).collect()
}

/// Metrics at @3/@6/@12 (those within the horizon) and pooled over every
/// step. Rows of `pred`/`target` are samples, columns are future steps.
///
/// Fails if no entry at all is valid; a single step with nothing valid is
/// reported without metrics.
pub fn horizon_report(pred: &Matrix, target: &Matrix, mask: &[bool], mape_floor: f64) -> Result<HorizonReport> {
    if pred.shape() != target.shape() || mask.len() != pred.len() {
        return Err(Error::ShapeMismatch {
            op: "horizon_report",
            left: pred.shape(),
            right: target.shape(),
        });
    }
    let horizon = pred.cols();
    if horizon == 0 {
        return Err(Error::EmptyInput("horizon_report: zero-length horizon".into()));
    }
    let mut rows = Vec::new();
    for &k in REPORT_HORIZONS.iter().filter(|&&k| k <= horizon) {
        let step_mask: Vec<bool> = (0..pred.rows()).map(|r| mask[r * horizon + k - 1]).collect();
        let valid = step_mask.iter().filter(|&&m| m).count();
        let m = (valid > 0)
            .then(|| metrics(&column(pred, k - 1), &column(target, k - 1), &step_mask, mape_floor))
            .transpose()?;
        rows.push(HorizonRow {
            label: HorizonLabel::Step(k),
            metrics: m,
            masked_count: step_mask.len() - valid,
        });
    }
    let m = metrics(pred.as_slice(), target.as_slice(), mask, mape_floor)?;
    rows.push(HorizonRow {
        label: HorizonLabel::Average,
        metrics: Some(m),
        masked_count: mask.len() - m.valid_count,
    });
    Ok(HorizonReport { rows, mape_floor })
}

fn fmt_mape(m: Option<f64>) -> String {
    m.map_or_else(|| "nan".to_string(), |v| format!("{v:?}"))
}

impl HorizonReport {
    /// Metrics pooled over every step.
    pub fn average(&self) -> Metrics {
        self.rows
            .last()
            .and_then(|r| r.metrics)
            .expect("report always has a populated average row")
    }

    pub fn step(&self, k: usize) -> Option<&HorizonRow> {
        self.rows.iter().find(|r| r.label == HorizonLabel::Step(k))
    }

    /// `horizon,mae,rmse,mape_pct,valid_count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("horizon,mae,rmse,mape_pct,valid_count\n");
        for r in &self.rows {
            match r.metrics {
                Some(m) => out.push_str(&format!(
                    "{},{:?},{:?},{},{}\n",
                    r.label,
                    m.mae,
                    m.rmse,
                    fmt_mape(m.mape),
                    m.valid_count
                )),
                None => out.push_str(&format!("{},nan,nan,nan,0\n", r.label)),
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

impl fmt::Display for HorizonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8}{:>12}{:>12}{:>12}{:>10}{:>10}", "horizon", "MAE", "RMSE", "MAPE(%)", "valid", "masked")?;
        for r in &self.rows {
            let Some(m) = r.metrics else {
                writeln!(f, "{:<8}{:>12}{:>12}{:>12}{:>10}{:>10}", r.label.to_string(), "n/a", "n/a", "n/a", 0, r.masked_count)?;
                continue;
            };
            let mape = m.mape.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"));
            writeln!(
                f,
                "{:<8}{:>12.4}{:>12.4}{:>12}{:>10}{:>10}",
                r.label.to_string(),
                m.mae,
                m.rmse,
                mape,
                m.valid_count,
                r.masked_count
            )?;
        }
        write!(f, "(MAPE excludes |target| < {})", self.mape_floor)
    }
}
