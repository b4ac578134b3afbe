use crate::data::{ForecastDataset, SplitKind};
use crate::error::{Error, Result};
use crate::evaluation::{split_origins, target_mask, Predictions};
use crate::math::Matrix;

/// Historical inertia: the forecast for the next F steps is the last F
/// observed history values, in order. Rows of `histories` are windows.
pub fn hi_baseline(histories: &Matrix, horizon: usize) -> Result<Matrix> {
    let p = histories.cols();
    if p < horizon {
        return Err(Error::invalid(format!(
            "historical inertia needs history length >= horizon, got P={p} < F={horizon}"
        )));
    }
    histories.column_slice(p - horizon, horizon)
}

/// Historical inertia over a split, in original units.
pub fn forecast_split_hi(dataset: &ForecastDataset, kind: SplitKind) -> Result<Predictions> {
    let origins = split_origins(dataset, kind)?;
    let pred = hi_baseline(&dataset.raw_histories(origins), dataset.spec().horizon)?;
    Ok(Predictions {
        pred,
        target: dataset.raw_targets(origins),
        mask: target_mask(dataset, origins),
    })
}
