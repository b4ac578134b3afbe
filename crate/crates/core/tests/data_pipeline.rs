use stid_core::data::{
    gen_synthetic_indistinguishable, load_csv, window_origins, DatasetSpec, ForecastDataset,
    SplitKind, SyntheticMode, SyntheticSpec,
};

#[test]
fn origin_counts() {
    assert_eq!(window_origins(16992, 12, 12, 1).unwrap().len(), 16969);
    assert_eq!(window_origins(24, 12, 12, 1).unwrap(), vec![12]);
    assert!(window_origins(23, 12, 12, 1).is_err());
}

#[test]
fn synthetic_csv_round_trip_feeds_a_dataset() {
    let spec = SyntheticSpec {
        noise_std: 0.3,
        seed: 5,
        ..SyntheticSpec::new(SyntheticMode::Combined)
    };
    let series = gen_synthetic_indistinguishable(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("combined.csv");
    series.write_csv(&path).unwrap();
    let back = load_csv(&path).unwrap();
    assert_eq!(back.num_slots(), series.num_slots());
    assert_eq!(back.num_vars(), 2);
    assert_eq!(back.slots_per_day(), 48);
    assert_eq!(back.anchor(), series.anchor());
    for (a, b) in back.values().as_slice().iter().zip(series.values().as_slice()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }

    let ds = ForecastDataset::prepare(
        back,
        DatasetSpec {
            stride: spec.block_len(),
            ..DatasetSpec::default()
        },
    )
    .unwrap();
    // 14 days × 2 blocks, split 60/20/20 with cumulative flooring.
    let sizes = [SplitKind::Train, SplitKind::Val, SplitKind::Test].map(|k| ds.origins(k).len());
    assert_eq!(sizes, [16, 6, 6]);
    let batch = ds.batch(ds.origins(SplitKind::Test));
    assert_eq!(batch.len(), 12);
    assert!(batch.histories.is_finite());
}

#[test]
fn shipped_example_data_loads() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let Ok(entries) = std::fs::read_dir(&root) else { return };
    for entry in entries.flatten() {
        let path = entry.path();
        if path.extension().is_some_and(|e| e == "csv") {
            load_csv(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        }
    }
}
