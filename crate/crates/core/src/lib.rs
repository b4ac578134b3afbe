//! Spatial-temporal identity forecaster for multivariate time series.
//!
//! A window of `P` past values from one variable is embedded by a linear
//! layer, concatenated with learned identity vectors for the variable, the
//! time of day and the day of week, passed through a stack of residual MLP
//! blocks and regressed onto the next `F` values. The identity tables let an
//! otherwise history-only regressor separate samples whose histories match
//! but whose futures differ.
//!
//! Modules, bottom up:
//! - [`math`]: dense matrices, seeded RNG, initialization, gradient oracle
//! - [`data`]: CSV ingestion, time features, windows, splits, normalization,
//!   synthetic datasets
//! - [`model`]: parameters, forward and backward passes, model files
//! - [`training`]: MAE loss, Adam, the epoch loop
//! - [`evaluation`]: metrics, horizon reports, the HI baseline, ablations,
//!   embedding export

pub mod data;
pub mod error;
pub mod evaluation;
pub mod math;
pub mod model;
pub mod training;

pub use error::{Error, Result};
