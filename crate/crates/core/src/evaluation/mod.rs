//! Forecast metrics, horizon reports, the historical-inertia baseline,
//! ablation runs and identity-table export.

mod ablation;
mod baseline;
mod export;
pub mod metrics;
mod report;

pub use ablation::{ablation_csv, run_ablation, write_ablation_csv, AblationResult, AblationVariant};
pub use baseline::{forecast_split_hi, hi_baseline};
pub use export::export_embeddings;
pub use metrics::{metrics, Metrics, DEFAULT_MAPE_FLOOR};
pub use report::{horizon_report, HorizonLabel, HorizonReport, HorizonRow, REPORT_HORIZONS};

use crate::data::{ForecastDataset, SplitKind};
use crate::error::{Error, Result};
use crate::math::Matrix;
use crate::model::{predict, StidConfig, StidParams};

/// Origins pushed through the network at once during evaluation.
const EVAL_CHUNK: usize = 256;

/// Forecasts for one split in original units.
///
/// Rows are `(origin, variable)` pairs, origin-major; columns are future
/// steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    pub pred: Matrix,
    pub target: Matrix,
    pub mask: Vec<bool>,
}

impl Predictions {
    pub fn report(&self, mape_floor: f64) -> Result<HorizonReport> {
        horizon_report(&self.pred, &self.target, &self.mask, mape_floor)
    }
}

fn split_origins(dataset: &ForecastDataset, kind: SplitKind) -> Result<&[usize]> {
    let origins = dataset.origins(kind);
    if origins.is_empty() {
        return Err(Error::EmptyInput(format!("{kind} split has no windows")));
    }
    Ok(origins)
}

fn target_mask(dataset: &ForecastDataset, origins: &[usize]) -> Vec<bool> {
    let f = dataset.spec().horizon;
    let n = dataset.num_vars();
    let series = dataset.series();
    let mut mask = Vec::with_capacity(origins.len() * n * f);
    for &origin in origins {
        for var in 0..n {
            mask.extend((origin..origin + f).map(|t| series.is_valid(t, var)));
        }
    }
    mask
}

/// Runs the model over every window of a split and maps the forecasts back
/// to original units.
pub fn forecast_split(
    params: &StidParams,
    config: &StidConfig,
    dataset: &ForecastDataset,
    kind: SplitKind,
) -> Result<Predictions> {
    let origins = split_origins(dataset, kind)?;
    let n = dataset.num_vars();
    let f = dataset.spec().horizon;
    let norm = dataset.normalizer();
    let mut pred = Matrix::zeros(origins.len() * n, f);
    for (c, chunk) in origins.chunks(EVAL_CHUNK).enumerate() {
        let batch = dataset.batch(chunk);
        let out = predict(params, config, &batch)?;
        for r in 0..out.rows() {
            let var = batch.var_idx[r];
            let dst = pred.row_mut(c * EVAL_CHUNK * n + r);
            for (d, &v) in dst.iter_mut().zip(out.row(r)) {
                *d = norm.invert(v, var);
            }
        }
    }
    Ok(Predictions {
        pred,
        target: dataset.raw_targets(origins),
        mask: target_mask(dataset, origins),
    })
}
