use std::fs;
use std::path::{Path, PathBuf};

use stid_core::data::{
    gen_synthetic_indistinguishable, load_csv, load_csv_with, ForecastDataset, SplitKind,
    SyntheticSpec,
};
use stid_core::evaluation::{
    export_embeddings, forecast_split, forecast_split_hi, run_ablation, write_ablation_csv,
    AblationResult, HorizonReport,
};
use stid_core::model::{load_params, StidConfig};
use stid_core::training::{fit, measure_seconds_per_epoch, EpochRecord, TrainReport};

use crate::config::RunConfig;
use crate::error::{as_data_error, CliError, CliResult};

pub const MODEL_FILE: &str = "model.stid";
pub const TRAIN_REPORT_FILE: &str = "train_report.csv";
pub const TEST_REPORT_FILE: &str = "test_report.csv";
pub const ABLATION_FILE: &str = "ablation.csv";
pub const BENCH_FILE: &str = "bench.csv";

fn load_dataset(config: &RunConfig) -> CliResult<ForecastDataset> {
    let path = config.dataset_path()?;
    if !path.is_file() {
        return Err(CliError::data(format!("dataset {} does not exist", path.display())));
    }
    let series = load_csv_with(path, config.load_options()).map_err(as_data_error)?;
    ForecastDataset::prepare(series, config.dataset_spec()).map_err(as_data_error)
}

fn epoch_line(r: &EpochRecord) -> String {
    format!(
        "epoch {:>4}  loss {:.6}  val_mae {:.4}  secs {:.3}",
        r.epoch, r.train_loss, r.val_mae, r.seconds
    )
}

/// Everything a `train` run produced.
#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub report: TrainReport,
    pub test: HorizonReport,
    pub checkpoint: PathBuf,
}

/// Trains, keeps the best-validation checkpoint and reports it on the test
/// split. Writes the checkpoint, the per-epoch CSV, the test report CSV and
/// the resolved configuration into the output directory.
pub fn cmd_train(config: &RunConfig) -> CliResult<TrainOutput> {
    config.validate()?;
    let dataset = load_dataset(config)?;
    config.echo()?;
    let model = config.model_config(dataset.num_vars(), dataset.slots_per_day());
    model.validate()?;
    let checkpoint = config.out.join(MODEL_FILE);
    let outcome = fit(&model, &config.train_config(), &dataset, Some(&checkpoint), |r| {
        println!("{}", epoch_line(r))
    })?;
    outcome.report.write_csv(&config.out.join(TRAIN_REPORT_FILE))?;
    let test = forecast_split(&outcome.best, &model, &dataset, SplitKind::Test)?.report(config.mape_floor)?;
    test.write_csv(&config.out.join(TEST_REPORT_FILE))?;
    println!("best epoch {} (val MAE {:.4}); test split:", outcome.report.best_epoch, outcome.report.best().val_mae);
    println!("{test}");
    Ok(TrainOutput {
        report: outcome.report,
        test,
        checkpoint,
    })
}

/// Evaluates a checkpoint, or the historical-inertia baseline when
/// `checkpoint` is `None`, on one split. Writes `eval_<split>.csv` or
/// `hi_<split>.csv` into the output directory.
pub fn cmd_evaluate(config: &RunConfig, checkpoint: Option<&Path>, split: SplitKind) -> CliResult<HorizonReport> {
    let mut config = config.clone();
    let (predictions, name) = match checkpoint {
        Some(path) => {
            let (params, model) = load_params(path).map_err(as_data_error)?;
            // The checkpoint fixes the window geometry.
            config.history_len = model.history_len;
            config.horizon = model.horizon;
            config.validate()?;
            let dataset = load_dataset(&config)?;
            let expected = StidConfig {
                num_vars: dataset.num_vars(),
                slots_per_day: dataset.slots_per_day(),
                ..model
            };
            if expected != model {
                return Err(CliError::config(format!(
                    "checkpoint {} was built for {model} but the dataset has N={} and N_d={}",
                    path.display(),
                    dataset.num_vars(),
                    dataset.slots_per_day()
                )));
            }
            (forecast_split(&params, &model, &dataset, split)?, format!("eval_{split}.csv"))
        }
        None => {
            config.validate()?;
            let dataset = load_dataset(&config)?;
            (forecast_split_hi(&dataset, split)?, format!("hi_{split}.csv"))
        }
    };
    let report = predictions.report(config.mape_floor)?;
    config.echo()?;
    report.write_csv(&config.out.join(name))?;
    println!("{report}");
    Ok(report)
}

/// Trains the full model and the three single-identity removals and writes
/// their test metrics to `ablation.csv`.
pub fn cmd_ablate(config: &RunConfig) -> CliResult<Vec<AblationResult>> {
    config.validate()?;
    let dataset = load_dataset(config)?;
    config.echo()?;
    let base = config.model_config(dataset.num_vars(), dataset.slots_per_day());
    let results = run_ablation(&base, &config.train_config(), &dataset, config.mape_floor, |r| {
        println!(
            "{:<10} test MAE {:.4}  RMSE {:.4}  (best epoch {})",
            r.variant.name(),
            r.test.average().mae,
            r.test.average().rmse,
            r.best_epoch
        )
    })?;
    write_ablation_csv(&results, &config.out.join(ABLATION_FILE))?;
    Ok(results)
}

/// Writes a synthetic dataset in the loader's CSV format and checks that it
/// reads back.
pub fn cmd_synth(spec: &SyntheticSpec, out: &Path) -> CliResult<()> {
    let series = gen_synthetic_indistinguishable(spec)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::data(format!("cannot create {}: {e}", dir.display())))?;
    }
    series.write_csv(out)?;
    let back = load_csv(out).map_err(as_data_error)?;
    println!(
        "wrote {} ({} slots x {} variables, {}-minute interval)",
        out.display(),
        back.num_slots(),
        back.num_vars(),
        back.interval_minutes()
    );
    Ok(())
}

/// Trains for `epochs` epochs and returns the mean training seconds per
/// epoch. Per-epoch times go to `bench.csv`.
pub fn cmd_bench(config: &RunConfig, epochs: usize) -> CliResult<f64> {
    let mut config = config.clone();
    config.epochs = epochs;
    config.validate()?;
    let dataset = load_dataset(&config)?;
    config.echo()?;
    let model = config.model_config(dataset.num_vars(), dataset.slots_per_day());
    let outcome = fit(&model, &config.train_config(), &dataset, None, |r| eprintln!("{}", epoch_line(r)))?;
    let mut csv = String::from("epoch,seconds\n");
    for r in &outcome.report.epochs {
        csv.push_str(&format!("{},{:?}\n", r.epoch, r.seconds));
    }
    let path = config.out.join(BENCH_FILE);
    fs::write(&path, csv).map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
    let mean = measure_seconds_per_epoch(&outcome.report)?;
    println!("{mean}");
    Ok(mean)
}

pub fn cmd_export_embeddings(checkpoint: &Path, out_dir: &Path) -> CliResult<Vec<PathBuf>> {
    let (params, _) = load_params(checkpoint).map_err(as_data_error)?;
    let written = export_embeddings(&params, out_dir)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(written)
}
