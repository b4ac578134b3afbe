//! Run configuration: a line-based `key = value` file plus overrides.
//!
//! ```text
//! # comments and blank lines are ignored
//! dataset = data/spatial.csv
//! d = 32
//! lr = 0.001
//! ```
//!
//! Unknown keys, repeated keys and unparsable values are errors that name
//! the offending key. Every key has a default; see [`RunConfig::default`].

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use stid_core::data::{DatasetSpec, LoadOptions, NormMode, SplitSpec};
use stid_core::evaluation::DEFAULT_MAPE_FLOOR;
use stid_core::model::StidConfig;
use stid_core::training::TrainConfig;

use crate::error::{CliError, CliResult};

/// File name the resolved configuration is echoed to.
pub const RESOLVED_CONFIG_FILE: &str = "config.txt";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub out: PathBuf,
    pub history_len: usize,
    pub horizon: usize,
    pub hidden_dim: usize,
    pub num_layers: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub split: SplitSpec,
    pub normalization: NormMode,
    pub window_stride: usize,
    pub use_spatial: bool,
    pub use_tid: bool,
    pub use_diw: bool,
    pub spatial_dim: Option<usize>,
    pub tid_dim: Option<usize>,
    pub diw_dim: Option<usize>,
    pub mape_floor: f64,
    pub grad_clip: Option<f64>,
    pub missing_value: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        Self {
            dataset: None,
            out: PathBuf::from("out"),
            history_len: 12,
            horizon: 12,
            hidden_dim: 32,
            num_layers: 3,
            learning_rate: train.learning_rate,
            epochs: train.epochs,
            batch_size: train.batch_size,
            seed: train.seed,
            split: SplitSpec::default(),
            normalization: NormMode::Global,
            window_stride: 1,
            use_spatial: true,
            use_tid: true,
            use_diw: true,
            spatial_dim: None,
            tid_dim: None,
            diw_dim: None,
            mape_floor: DEFAULT_MAPE_FLOOR,
            grad_clip: None,
            missing_value: None,
        }
    }
}

pub const KEYS: [&str; 24] = [
    "dataset",
    "out",
    "p",
    "f",
    "d",
    "layers",
    "lr",
    "epochs",
    "batch_size",
    "seed",
    "train_ratio",
    "val_ratio",
    "test_ratio",
    "normalization",
    "window_stride",
    "use_spatial",
    "use_tid",
    "use_diw",
    "spatial_dim",
    "tid_dim",
    "diw_dim",
    "mape_floor",
    "grad_clip",
    "missing_value",
];

fn parse<T: FromStr>(key: &str, value: &str) -> CliResult<T>
where
    T::Err: Display,
{
    value
        .parse()
        .map_err(|e| CliError::config(format!("invalid value {value:?} for {key}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> CliResult<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(CliError::config(format!("invalid value {value:?} for {key}: expected true or false"))),
    }
}

fn parse_opt<T: FromStr>(key: &str, value: &str) -> CliResult<Option<T>>
where
    T::Err: Display,
{
    if value.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn show_opt<T: Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), T::to_string)
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match key {
            "dataset" => self.dataset = parse_opt(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "p" => self.history_len = parse(key, value)?,
            "f" => self.horizon = parse(key, value)?,
            "d" => self.hidden_dim = parse(key, value)?,
            "layers" => self.num_layers = parse(key, value)?,
            "lr" => self.learning_rate = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "batch_size" => self.batch_size = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "train_ratio" => self.split.train = parse(key, value)?,
            "val_ratio" => self.split.val = parse(key, value)?,
            "test_ratio" => self.split.test = parse(key, value)?,
            "normalization" => self.normalization = parse(key, value)?,
            "window_stride" => self.window_stride = parse(key, value)?,
            "use_spatial" => self.use_spatial = parse_bool(key, value)?,
            "use_tid" => self.use_tid = parse_bool(key, value)?,
            "use_diw" => self.use_diw = parse_bool(key, value)?,
            "spatial_dim" => self.spatial_dim = parse_opt(key, value)?,
            "tid_dim" => self.tid_dim = parse_opt(key, value)?,
            "diw_dim" => self.diw_dim = parse_opt(key, value)?,
            "mape_floor" => self.mape_floor = parse(key, value)?,
            "grad_clip" => self.grad_clip = parse_opt(key, value)?,
            "missing_value" => self.missing_value = parse_opt(key, value)?,
            other => {
                return Err(CliError::config(format!(
                    "unknown config key {other:?} (known keys: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> CliResult<()> {
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("{origin}:{}: expected `key = value`", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key) {
                return Err(CliError::config(format!("{origin}:{}: {key} is set twice", n + 1)));
            }
            seen.push(key);
            self.set(key, value)
                .map_err(|e| CliError::config(format!("{origin}:{}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut config = Self::default();
        config.apply_text(&text, &path.display().to_string())?;
        Ok(config)
    }

    /// Applies a `key=value` override as given on the command line.
    pub fn apply_override(&mut self, assignment: &str) -> CliResult<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("override {assignment:?} is not key=value")))?;
        self.set(key.trim(), value.trim())
    }

    /// Every key with its resolved value, in a form [`Self::apply_text`]
    /// reads back to the same configuration.
    pub fn to_text(&self) -> String {
        let values = [
            show_opt(&self.dataset.as_ref().map(|p| p.display())),
            self.out.display().to_string(),
            self.history_len.to_string(),
            self.horizon.to_string(),
            self.hidden_dim.to_string(),
            self.num_layers.to_string(),
            format!("{:?}", self.learning_rate),
            self.epochs.to_string(),
            self.batch_size.to_string(),
            self.seed.to_string(),
            format!("{:?}", self.split.train),
            format!("{:?}", self.split.val),
            format!("{:?}", self.split.test),
            self.normalization.to_string(),
            self.window_stride.to_string(),
            self.use_spatial.to_string(),
            self.use_tid.to_string(),
            self.use_diw.to_string(),
            show_opt(&self.spatial_dim),
            show_opt(&self.tid_dim),
            show_opt(&self.diw_dim),
            format!("{:?}", self.mape_floor),
            show_opt(&self.grad_clip.map(|v| format!("{v:?}"))),
            show_opt(&self.missing_value.map(|v| format!("{v:?}"))),
        ];
        KEYS.iter()
            .zip(values)
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Checks everything that can be checked without the data.
    pub fn validate(&self) -> CliResult<()> {
        self.split.validate()?;
        self.train_config().validate()?;
        if self.history_len == 0 || self.horizon == 0 {
            return Err(CliError::config("p and f must be at least 1"));
        }
        if self.window_stride == 0 {
            return Err(CliError::config("window_stride must be at least 1"));
        }
        if !(self.mape_floor >= 0.0 && self.mape_floor.is_finite()) {
            return Err(CliError::config(format!("mape_floor {} must be a non-negative number", self.mape_floor)));
        }
        // Dimensions tied to the data are checked once it is loaded; use
        // placeholders for them here.
        self.model_config(1, 1).validate()?;
        Ok(())
    }

    pub fn dataset_path(&self) -> CliResult<&Path> {
        self.dataset
            .as_deref()
            .ok_or_else(|| CliError::config("no dataset given (set `dataset` in the config or pass --dataset)"))
    }

    pub fn dataset_spec(&self) -> DatasetSpec {
        DatasetSpec {
            history_len: self.history_len,
            horizon: self.horizon,
            stride: self.window_stride,
            split: self.split,
            normalization: self.normalization,
        }
    }

    pub fn load_options(&self) -> LoadOptions {
        LoadOptions {
            missing_sentinel: self.missing_value,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed: self.seed,
            grad_clip: self.grad_clip,
        }
    }

    pub fn model_config(&self, num_vars: usize, slots_per_day: usize) -> StidConfig {
        let mut c = StidConfig::new(num_vars, self.history_len, self.horizon, slots_per_day)
            .with_hidden(self.hidden_dim, self.num_layers)
            .with_identities(self.use_spatial, self.use_tid, self.use_diw);
        c.spatial_dim = self.spatial_dim;
        c.tid_dim = self.tid_dim;
        c.diw_dim = self.diw_dim;
        c
    }

    /// Writes [`Self::to_text`] into the output directory.
    pub fn echo(&self) -> CliResult<PathBuf> {
        fs::create_dir_all(&self.out)
            .map_err(|e| CliError::data(format!("cannot create {}: {e}", self.out.display())))?;
        let path = self.out.join(RESOLVED_CONFIG_FILE);
        fs::write(&path, self.to_text())
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}
