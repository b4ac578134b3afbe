//! Loss, optimizer and the training loop.

mod adam;
mod loss;
mod trainer;

pub use adam::{Adam, AdamConfig};
pub use loss::mae_loss;
pub use trainer::{fit, measure_seconds_per_epoch, train_epoch, EpochRecord, FitOutcome, TrainConfig, TrainReport};
