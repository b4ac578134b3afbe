use crate::data::{
    split_chronological, window_origins, NormMode, Normalizer, RawSeries, Split, SplitKind,
    SplitSpec, WindowSample,
};
use crate::error::{Error, Result};
use crate::math::Matrix;

/// Model inputs and targets for a set of `(variable, origin)` samples.
///
/// Rows are samples. `targets` and `histories` are in whatever units the
/// producer used (normalized when built by [`ForecastDataset::batch`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub histories: Matrix,
    pub targets: Matrix,
    pub mask: Vec<bool>,
    pub var_idx: Vec<usize>,
    pub tid: Vec<usize>,
    pub diw: Vec<usize>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.histories.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stacks window samples as-is (no normalization).
    pub fn from_samples(samples: &[WindowSample]) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::EmptyInput("batch needs at least one sample".into()))?;
        let (p, f) = (first.history.len(), first.future.len());
        let mut histories = Vec::with_capacity(samples.len() * p);
        let mut targets = Vec::with_capacity(samples.len() * f);
        let mut mask = Vec::with_capacity(samples.len() * f);
        for s in samples {
            if s.history.len() != p || s.future.len() != f || s.future_mask.len() != f {
                return Err(Error::invalid(format!(
                    "sample (var {}, origin {}) has lengths {}/{}, expected {p}/{f}",
                    s.var_index,
                    s.origin,
                    s.history.len(),
                    s.future.len()
                )));
            }
            histories.extend_from_slice(&s.history);
            targets.extend_from_slice(&s.future);
            mask.extend_from_slice(&s.future_mask);
        }
        Ok(Self {
            histories: Matrix::from_vec(samples.len(), p, histories)?,
            targets: Matrix::from_vec(samples.len(), f, targets)?,
            mask,
            var_idx: samples.iter().map(|s| s.var_index).collect(),
            tid: samples.iter().map(|s| s.tid).collect(),
            diw: samples.iter().map(|s| s.diw).collect(),
        })
    }
}

/// How to cut a series into windows and splits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetSpec {
    pub history_len: usize,
    pub horizon: usize,
    /// Distance between consecutive window origins.
    pub stride: usize,
    pub split: SplitSpec,
    pub normalization: NormMode,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            history_len: 12,
            horizon: 12,
            stride: 1,
            split: SplitSpec::default(),
            normalization: NormMode::Global,
        }
    }
}

/// A series with its window origins split chronologically and a
/// normalizer fit on the training part.
///
/// Windows are materialized lazily per batch; only the normalized copy of
/// the series is kept in memory.
#[derive(Debug, Clone)]
pub struct ForecastDataset {
    series: RawSeries,
    normalized: Matrix,
    normalizer: Normalizer,
    spec: DatasetSpec,
    split: Split,
}

impl ForecastDataset {
    pub fn prepare(series: RawSeries, spec: DatasetSpec) -> Result<Self> {
        let origins = window_origins(series.num_slots(), spec.history_len, spec.horizon, spec.stride)?;
        let split = split_chronological(&origins, spec.split)?;
        let normalizer = Normalizer::fit(&series, &split.train, spec.history_len, spec.normalization)?;
        let (rows, cols) = series.values().shape();
        let mut normalized = Matrix::zeros(rows, cols);
        for t in 0..rows {
            for var in 0..cols {
                // Missing cells become the mean, i.e. 0 after scaling.
                let v = if series.is_valid(t, var) {
                    normalizer.apply(series.value(t, var), var)
                } else {
                    0.0
                };
                normalized.set(t, var, v);
            }
        }
        Ok(Self {
            series,
            normalized,
            normalizer,
            spec,
            split,
        })
    }

    pub fn series(&self) -> &RawSeries {
        &self.series
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    pub fn spec(&self) -> &DatasetSpec {
        &self.spec
    }

    pub fn split(&self) -> &Split {
        &self.split
    }

    pub fn origins(&self, kind: SplitKind) -> &[usize] {
        self.split.get(kind)
    }

    pub fn num_vars(&self) -> usize {
        self.series.num_vars()
    }

    pub fn slots_per_day(&self) -> usize {
        self.series.slots_per_day()
    }

    /// Normalized batch holding every variable at each origin, origin-major.
    pub fn batch(&self, origins: &[usize]) -> Batch {
        let (p, f) = (self.spec.history_len, self.spec.horizon);
        let n = self.num_vars();
        let rows = origins.len() * n;
        let mut histories = Matrix::zeros(rows, p);
        let mut targets = Matrix::zeros(rows, f);
        let mut mask = Vec::with_capacity(rows * f);
        let mut var_idx = Vec::with_capacity(rows);
        let mut tid = Vec::with_capacity(rows);
        let mut diw = Vec::with_capacity(rows);
        for (k, &origin) in origins.iter().enumerate() {
            let (slot_tid, slot_diw) = self.series.time_features(origin);
            for var in 0..n {
                let row = k * n + var;
                for (j, h) in histories.row_mut(row).iter_mut().enumerate() {
                    *h = self.normalized.get(origin - p + j, var);
                }
                for (j, y) in targets.row_mut(row).iter_mut().enumerate() {
                    *y = self.normalized.get(origin + j, var);
                }
                mask.extend((origin..origin + f).map(|t| self.series.is_valid(t, var)));
                var_idx.push(var);
                tid.push(slot_tid);
                diw.push(slot_diw);
            }
        }
        Batch {
            histories,
            targets,
            mask,
            var_idx,
            tid,
            diw,
        }
    }

    /// Targets in original units for the same row layout as [`Self::batch`].
    pub fn raw_targets(&self, origins: &[usize]) -> Matrix {
        let f = self.spec.horizon;
        let n = self.num_vars();
        let mut out = Matrix::zeros(origins.len() * n, f);
        for (k, &origin) in origins.iter().enumerate() {
            for var in 0..n {
                for (j, y) in out.row_mut(k * n + var).iter_mut().enumerate() {
                    *y = self.series.value(origin + j, var);
                }
            }
        }
        out
    }

    /// Raw histories, same layout as [`Self::batch`].
    pub fn raw_histories(&self, origins: &[usize]) -> Matrix {
        let p = self.spec.history_len;
        let n = self.num_vars();
        let mut out = Matrix::zeros(origins.len() * n, p);
        for (k, &origin) in origins.iter().enumerate() {
            for var in 0..n {
                for (j, h) in out.row_mut(k * n + var).iter_mut().enumerate() {
                    *h = self.series.value(origin - p + j, var);
                }
            }
        }
        out
    }
}
