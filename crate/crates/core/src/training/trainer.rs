use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::data::{ForecastDataset, SplitKind};
use crate::error::{Error, Result};
use crate::evaluation::{forecast_split, metrics};
use crate::math::Rng;
use crate::model::{backward, forward, save_params, StidConfig, StidParams};
use crate::training::{mae_loss, Adam, AdamConfig};

const INIT_STREAM: u64 = 0x1417;
const SHUFFLE_STREAM: u64 = 0x5417;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Window origins per batch; each origin contributes all N variables.
    pub batch_size: usize,
    pub seed: u64,
    /// Rescale gradients whose global L2 norm exceeds this.
    pub grad_clip: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            epochs: 100,
            batch_size: 32,
            seed: 0,
            grad_clip: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::invalid("epochs and batch_size must be at least 1"));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid(format!("learning rate {} is not a non-negative number", self.learning_rate)));
        }
        if let Some(c) = self.grad_clip {
            if c.is_nan() || c <= 0.0 {
                return Err(Error::invalid(format!("gradient clip {c} must be positive")));
            }
        }
        Ok(())
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            ..AdamConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_mae: f64,
    /// Wall-clock time of the training pass only.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_checkpoint: Option<PathBuf>,
}

impl TrainReport {
    pub fn best(&self) -> &EpochRecord {
        &self.epochs[self.best_epoch]
    }

    /// `epoch,train_loss,val_mae,seconds` with full-precision floats.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_mae,seconds\n");
        for r in &self.epochs {
            out.push_str(&format!("{},{:?},{:?},{:?}\n", r.epoch, r.train_loss, r.val_mae, r.seconds));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Mean per-epoch training time.
pub fn measure_seconds_per_epoch(report: &TrainReport) -> Result<f64> {
    if report.epochs.is_empty() {
        return Err(Error::EmptyInput("train report has no epochs".into()));
    }
    Ok(report.epochs.iter().map(|r| r.seconds).sum::<f64>() / report.epochs.len() as f64)
}

/// One pass over the shuffled training origins. Returns the mean batch loss.
pub fn train_epoch(
    params: &mut StidParams,
    adam: &mut Adam,
    dataset: &ForecastDataset,
    config: &StidConfig,
    train: &TrainConfig,
    rng: &mut Rng,
) -> Result<f64> {
    let mut origins = dataset.origins(SplitKind::Train).to_vec();
    if origins.is_empty() {
        return Err(Error::EmptyInput("training split is empty".into()));
    }
    rng.shuffle(&mut origins);
    let mut total = 0.0;
    let mut batches = 0usize;
    for (index, chunk) in origins.chunks(train.batch_size).enumerate() {
        let batch = dataset.batch(chunk);
        if !batch.mask.iter().any(|&m| m) {
            continue;
        }
        let (pred, cache) = forward(params, config, &batch)?;
        let (loss, d_pred) = mae_loss(&pred, &batch.targets, &batch.mask)?;
        if !loss.is_finite() {
            return Err(Error::NonFinite(format!("training loss in batch {index}")));
        }
        let mut grads = backward(params, config, &cache, &d_pred)?;
        if let Some(limit) = train.grad_clip {
            let norm = grads.global_norm();
            if norm > limit {
                grads.scale(limit / norm);
            }
        }
        adam.step_params(params, &grads)
            .map_err(|e| match e {
                Error::NonFinite(msg) => Error::NonFinite(format!("{msg} in batch {index}")),
                other => other,
            })?;
        total += loss;
        batches += 1;
    }
    if batches == 0 {
        return Err(Error::EmptyInput("no training batch has a valid target".into()));
    }
    Ok(total / batches as f64)
}

/// Result of [`fit`]: the report plus the best and the final parameters.
#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub report: TrainReport,
    pub best: StidParams,
    pub last: StidParams,
}

/// Trains from a fresh initialization and keeps the parameters with the
/// lowest validation MAE (original units; first epoch wins ties).
///
/// When `checkpoint` is given, the best parameters are written there each
/// time they improve. `on_epoch` sees every record as it is produced.
pub fn fit(
    config: &StidConfig,
    train: &TrainConfig,
    dataset: &ForecastDataset,
    checkpoint: Option<&Path>,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<FitOutcome> {
    train.validate()?;
    config.validate()?;
    if config.num_vars != dataset.num_vars()
        || config.history_len != dataset.spec().history_len
        || config.horizon != dataset.spec().horizon
        || config.slots_per_day != dataset.slots_per_day()
    {
        return Err(Error::ConfigMismatch {
            expected: config.to_string(),
            found: format!(
                "dataset with N={} P={} F={} N_d={}",
                dataset.num_vars(),
                dataset.spec().history_len,
                dataset.spec().horizon,
                dataset.slots_per_day()
            ),
        });
    }
    let root = Rng::new(train.seed);
    let mut params = StidParams::init(config, &root.fork(INIT_STREAM))?;
    let mut shuffle = root.fork(SHUFFLE_STREAM);
    let mut adam = Adam::new(train.adam());

    let mut records = Vec::with_capacity(train.epochs);
    let mut best: Option<(usize, f64, StidParams)> = None;
    for epoch in 0..train.epochs {
        let start = Instant::now();
        let train_loss = train_epoch(&mut params, &mut adam, dataset, config, train, &mut shuffle)
            .map_err(|e| match e {
                Error::NonFinite(msg) => Error::NonFinite(format!("{msg}, epoch {epoch}")),
                other => other,
            })?;
        let seconds = start.elapsed().as_secs_f64();

        let val = forecast_split(&params, config, dataset, SplitKind::Val)?;
        let val_mae = metrics::mae(val.pred.as_slice(), val.target.as_slice(), &val.mask)?;
        if !val_mae.is_finite() {
            return Err(Error::NonFinite(format!("validation MAE after epoch {epoch}")));
        }
        let record = EpochRecord {
            epoch,
            train_loss,
            val_mae,
            seconds,
        };
        on_epoch(&record);
        records.push(record);

        if best.as_ref().is_none_or(|(_, v, _)| val_mae < *v) {
            if let Some(path) = checkpoint {
                save_params(&params, config, path)?;
            }
            best = Some((epoch, val_mae, params.clone()));
        }
    }
    let (best_epoch, _, best_params) = best.expect("at least one epoch");
    Ok(FitOutcome {
        report: TrainReport {
            epochs: records,
            best_epoch,
            best_checkpoint: checkpoint.map(Path::to_path_buf),
        },
        best: best_params,
        last: params,
    })
}
