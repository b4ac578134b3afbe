use proptest::prelude::*;
use stid_core::data::{Anchor, DatasetSpec, ForecastDataset, NormMode, RawSeries, SplitKind};
use stid_core::evaluation::{
    export_embeddings, forecast_split_hi, horizon_report, metrics, DEFAULT_MAPE_FLOOR,
};
use stid_core::math::{Matrix, Rng};
use stid_core::model::{StidConfig, StidParams};

/// Plain loops, written independently of the library.
fn brute_force(pred: &[f64], target: &[f64], mask: &[bool], floor: f64) -> (f64, f64, Option<f64>) {
    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    let mut count = 0.0;
    let mut pct_sum = 0.0;
    let mut pct_count = 0.0;
    for i in 0..pred.len() {
        if !mask[i] {
            continue;
        }
        let e = pred[i] - target[i];
        abs_sum += e.abs();
        sq_sum += e * e;
        count += 1.0;
        if target[i].abs() >= floor {
            pct_sum += (e / target[i]).abs();
            pct_count += 1.0;
        }
    }
    let mape = if pct_count > 0.0 { Some(100.0 * pct_sum / pct_count) } else { None };
    (abs_sum / count, (sq_sum / count).sqrt(), mape)
}

#[test]
fn metrics_match_brute_force_on_random_arrays() {
    let mut rng = Rng::new(2024);
    for case in 0..100 {
        let n = 1 + rng.below(200) as usize;
        let pred: Vec<f64> = (0..n).map(|_| rng.uniform(-50.0, 50.0)).collect();
        let mut target: Vec<f64> = (0..n).map(|_| rng.uniform(-50.0, 50.0)).collect();
        target[0] = 0.0;
        let mut mask: Vec<bool> = (0..n).map(|_| rng.next_f64() < 0.8).collect();
        mask[n - 1] = true;
        let m = metrics(&pred, &target, &mask, DEFAULT_MAPE_FLOOR).unwrap();
        let (mae, rmse, mape) = brute_force(&pred, &target, &mask, DEFAULT_MAPE_FLOOR);
        assert!((m.mae - mae).abs() <= 1e-12 * mae.max(1.0), "case {case}");
        assert!((m.rmse - rmse).abs() <= 1e-12 * rmse.max(1.0), "case {case}");
        match (m.mape, mape) {
            (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-12 * b.max(1.0), "case {case}"),
            (a, b) => assert_eq!(a, b, "case {case}"),
        }
        assert!(m.rmse >= m.mae);
    }
}

proptest! {
    #[test]
    fn rmse_never_below_mae(
        pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3, any::<bool>()), 1..64)
    ) {
        let pred: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let target: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let mut mask: Vec<bool> = pairs.iter().map(|p| p.2).collect();
        mask[0] = true;
        let m = metrics(&pred, &target, &mask, DEFAULT_MAPE_FLOOR).unwrap();
        prop_assert!(m.rmse >= m.mae * (1.0 - 1e-12));
        prop_assert!(m.mae >= 0.0);
    }
}

fn ramp_dataset(len: usize, history: usize, horizon: usize) -> ForecastDataset {
    let values: Vec<f64> = (0..len * 2).map(|i| (i / 2) as f64 * if i % 2 == 0 { 1.0 } else { 3.0 }).collect();
    let series = RawSeries::from_values("ramp", Matrix::from_vec(len, 2, values).unwrap(), 5, Anchor::default()).unwrap();
    ForecastDataset::prepare(
        series,
        DatasetSpec {
            history_len: history,
            horizon,
            normalization: NormMode::None,
            ..DatasetSpec::default()
        },
    )
    .unwrap()
}

#[test]
fn historical_inertia_on_ramps() {
    let ds = ramp_dataset(200, 12, 12);
    let out = forecast_split_hi(&ds, SplitKind::Test).unwrap();
    // Variable 0 climbs 1 per slot, variable 1 climbs 3 per slot.
    for r in 0..out.pred.rows() {
        let slope = if r % 2 == 0 { 1.0 } else { 3.0 };
        for k in 0..12 {
            assert_eq!(out.target.get(r, k) - out.pred.get(r, k), 12.0 * slope);
        }
    }
    let report = horizon_report(&out.pred, &out.target, &out.mask, DEFAULT_MAPE_FLOOR).unwrap();
    assert_eq!(report.average().mae, 24.0);
    let again = forecast_split_hi(&ds, SplitKind::Test).unwrap().report(DEFAULT_MAPE_FLOOR).unwrap();
    assert_eq!(again, report);
}

#[test]
fn historical_inertia_needs_long_enough_history() {
    let ds = ramp_dataset(50, 4, 6);
    assert!(forecast_split_hi(&ds, SplitKind::Test).is_err());
}

#[test]
fn step_twelve_error_is_diluted_in_average() {
    let target = Matrix::filled(10, 12, 5.0);
    let mut pred = target.clone();
    for r in 0..10 {
        pred.set(r, 11, 5.0 + r as f64);
    }
    let report = horizon_report(&pred, &target, &[true; 120], DEFAULT_MAPE_FLOOR).unwrap();
    let at = |k| report.step(k).unwrap().metrics.unwrap().mae;
    assert_eq!((at(3), at(6)), (0.0, 0.0));
    assert!((report.average().mae - at(12) / 12.0).abs() < 1e-15);
    let csv = report.to_csv();
    assert_eq!(csv.lines().map(|l| l.split(',').next().unwrap()).collect::<Vec<_>>(), ["horizon", "@3", "@6", "@12", "avg"]);
}

#[test]
fn exported_tables_for_pems_sized_model() {
    let config = StidConfig::new(170, 12, 12, 288);
    let params = StidParams::init(&config, &Rng::new(8)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    export_embeddings(&params, dir.path()).unwrap();
    let rows = |name: &str| std::fs::read_to_string(dir.path().join(name)).unwrap().lines().count() - 1;
    assert_eq!((rows("E.csv"), rows("T_tid.csv"), rows("T_diw.csv")), (170, 288, 7));
}
