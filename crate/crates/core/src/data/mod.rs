//! Dataset ingestion, window generation, splitting and normalization.

mod dataset;
mod normalize;
mod series;
mod synthetic;
mod windows;

pub use dataset::{Batch, DatasetSpec, ForecastDataset};
pub use normalize::{NormMode, Normalizer, MIN_STD};
pub use series::{
    derive_time_features, load_csv, load_csv_with, Anchor, LoadOptions, RawSeries, DAYS_PER_WEEK,
    MINUTES_PER_DAY,
};
pub use synthetic::{gen_synthetic_indistinguishable, SyntheticMode, SyntheticSpec};
pub use windows::{
    make_windows, split_chronological, window_origins, Split, SplitKind, SplitSpec, WindowSample,
};
