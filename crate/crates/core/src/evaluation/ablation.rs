use std::fmt;
use std::fs;
use std::path::Path;

use crate::data::{ForecastDataset, SplitKind};
use crate::error::{Error, Result};
use crate::evaluation::{forecast_split, HorizonReport};
use crate::model::StidConfig;
use crate::training::{fit, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AblationVariant {
    Full,
    WithoutSpatial,
    WithoutTimeOfDay,
    WithoutDayOfWeek,
}

impl AblationVariant {
    pub const ALL: [AblationVariant; 4] = [
        AblationVariant::Full,
        AblationVariant::WithoutSpatial,
        AblationVariant::WithoutTimeOfDay,
        AblationVariant::WithoutDayOfWeek,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AblationVariant::Full => "full",
            AblationVariant::WithoutSpatial => "w/o E",
            AblationVariant::WithoutTimeOfDay => "w/o T^TiD",
            AblationVariant::WithoutDayOfWeek => "w/o T^DiW",
        }
    }

    /// `base` with this variant's identity switched off.
    pub fn apply(self, base: &StidConfig) -> StidConfig {
        let mut c = *base;
        c.use_spatial = true;
        c.use_tid = true;
        c.use_diw = true;
        match self {
            AblationVariant::Full => {}
            AblationVariant::WithoutSpatial => c.use_spatial = false,
            AblationVariant::WithoutTimeOfDay => c.use_tid = false,
            AblationVariant::WithoutDayOfWeek => c.use_diw = false,
        }
        c
    }
}

impl fmt::Display for AblationVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationResult {
    pub variant: AblationVariant,
    pub config: StidConfig,
    pub best_epoch: usize,
    pub val_mae: f64,
    /// Test-split report of the best-validation parameters.
    pub test: HorizonReport,
}

/// Trains and tests the full model and the three single-identity removals
/// with the same seed and training settings.
///
/// `on_variant` is called after each variant finishes.
pub fn run_ablation(
    base: &StidConfig,
    train: &TrainConfig,
    dataset: &ForecastDataset,
    mape_floor: f64,
    mut on_variant: impl FnMut(&AblationResult),
) -> Result<Vec<AblationResult>> {
    let mut results = Vec::with_capacity(4);
    for variant in AblationVariant::ALL {
        let config = variant.apply(base);
        let outcome = fit(&config, train, dataset, None, |_| {})?;
        let test = forecast_split(&outcome.best, &config, dataset, SplitKind::Test)?.report(mape_floor)?;
        let result = AblationResult {
            variant,
            config,
            best_epoch: outcome.report.best_epoch,
            val_mae: outcome.report.best().val_mae,
            test,
        };
        on_variant(&result);
        results.push(result);
    }
    Ok(results)
}

/// `variant,mae,rmse,mape_pct,valid_count` from each variant's average row.
pub fn ablation_csv(results: &[AblationResult]) -> String {
    let mut out = String::from("variant,mae,rmse,mape_pct,valid_count\n");
    for r in results {
        let m = r.test.average();
        let mape = m.mape.map_or_else(|| "nan".to_string(), |v| format!("{v:?}"));
        out.push_str(&format!("{},{:?},{:?},{},{}\n", r.variant, m.mae, m.rmse, mape, m.valid_count));
    }
    out
}

pub fn write_ablation_csv(results: &[AblationResult], path: &Path) -> Result<()> {
    fs::write(path, ablation_csv(results)).map_err(|e| Error::io(path, e))
}
