use crate::data::RawSeries;
use crate::error::{Error, Result};

/// One `(variable, origin)` training instance. `origin` is the first future
/// slot; the identity features are those of the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSample {
    pub var_index: usize,
    pub origin: usize,
    pub history: Vec<f64>,
    pub history_mask: Vec<bool>,
    pub future: Vec<f64>,
    pub future_mask: Vec<bool>,
    pub tid: usize,
    pub diw: usize,
}

/// Window origins `t` with `history ≤ t ≤ len - horizon`, every `stride` slots.
pub fn window_origins(len: usize, history: usize, horizon: usize, stride: usize) -> Result<Vec<usize>> {
    if history == 0 || horizon == 0 || stride == 0 {
        return Err(Error::invalid(format!(
            "history ({history}), horizon ({horizon}) and stride ({stride}) must be positive"
        )));
    }
    if len < history + horizon {
        return Err(Error::SeriesTooShort {
            len,
            needed: history + horizon,
        });
    }
    Ok((history..=len - horizon).step_by(stride).collect())
}

/// Every `(variable, origin)` sample of the series, origin-major.
pub fn make_windows(series: &RawSeries, history: usize, horizon: usize) -> Result<Vec<WindowSample>> {
    let origins = window_origins(series.num_slots(), history, horizon, 1)?;
    let mut out = Vec::with_capacity(origins.len() * series.num_vars());
    for &origin in &origins {
        let (tid, diw) = series.time_features(origin);
        for var in 0..series.num_vars() {
            let past = origin - history..origin;
            let next = origin..origin + horizon;
            out.push(WindowSample {
                var_index: var,
                origin,
                history: past.clone().map(|t| series.value(t, var)).collect(),
                history_mask: past.map(|t| series.is_valid(t, var)).collect(),
                future: next.clone().map(|t| series.value(t, var)).collect(),
                future_mask: next.map(|t| series.is_valid(t, var)).collect(),
                tid,
                diw,
            });
        }
    }
    Ok(out)
}

/// Train/validation/test proportions over window origins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl SplitSpec {
    pub const fn new(train: f64, val: f64, test: f64) -> Self {
        Self { train, val, test }
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|r| !(0.0..=1.0).contains(r)) || ((parts.iter().sum::<f64>()) - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(format!(
                "split ratios {}:{}:{} must lie in [0, 1] and sum to 1",
                self.train, self.val, self.test
            )));
        }
        Ok(())
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self::new(0.6, 0.2, 0.2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    Train,
    Val,
    Test,
}

impl std::fmt::Display for SplitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Train => "train",
            Self::Val => "val",
            Self::Test => "test",
        })
    }
}

impl std::str::FromStr for SplitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Self::Train),
            "val" | "valid" | "validation" => Ok(Self::Val),
            "test" => Ok(Self::Test),
            other => Err(Error::invalid(format!("unknown split {other:?} (train, val, test)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    pub fn get(&self, kind: SplitKind) -> &[usize] {
        match kind {
            SplitKind::Train => &self.train,
            SplitKind::Val => &self.val,
            SplitKind::Test => &self.test,
        }
    }
}

// Absorbs representation error in sums like 0.7 + 0.1 before flooring.
const BOUNDARY_SLACK: f64 = 1e-9;

/// Sorts origins and cuts them into contiguous train/val/test blocks at
/// `floor(train·n)` and `floor((train+val)·n)`.
pub fn split_chronological(origins: &[usize], spec: SplitSpec) -> Result<Split> {
    spec.validate()?;
    let mut sorted = origins.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let n = sorted.len() as f64;
    let first = ((spec.train * n) + BOUNDARY_SLACK).floor() as usize;
    let second = (((spec.train + spec.val) * n) + BOUNDARY_SLACK).floor() as usize;
    let second = second.clamp(first, sorted.len());
    let split = Split {
        test: sorted[second..].to_vec(),
        val: sorted[first..second].to_vec(),
        train: sorted[..first].to_vec(),
    };
    for (kind, part) in [("train", &split.train), ("val", &split.val), ("test", &split.test)] {
        if part.is_empty() {
            return Err(Error::EmptyInput(format!(
                "{kind} split is empty ({} origins, ratios {}:{}:{})",
                sorted.len(),
                spec.train,
                spec.val,
                spec.test
            )));
        }
    }
    Ok(split)
}
