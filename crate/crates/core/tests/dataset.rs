use smote_reg::dataset::{load_csv, synth_benchmark, write_csv, NanorodTarget, Origin, Table, FEATURE_COLUMNS};
use smote_reg::oversample::{smote_reg, SmoteConfig};

fn features() -> Vec<String> {
    FEATURE_COLUMNS.iter().map(|s| s.to_string()).collect()
}

#[test]
fn augmented_csv_round_trips_with_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("aug.csv");
    let data = synth_benchmark(6, 2, NanorodTarget::Length).unwrap();
    let aug = smote_reg(&data, &SmoteConfig { seed: 4, ..Default::default() }).unwrap().dataset;
    write_csv(&aug, &path).unwrap();

    let table = Table::read(&path).unwrap();
    assert_eq!(table.headers.len(), 3 + 1 + 3);
    assert!(table.has_column("lambda"));

    let back = load_csv(&path, &features(), "length_nm").unwrap();
    assert_eq!(back, aug);
    assert_eq!(back.count_original(), 6);
    assert!(back.samples()[6..].iter().all(|s| s.origin == Origin::Synthetic));
}

#[test]
fn missing_and_bad_columns_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "core_edge_nm,core_amount_nmol,length_nm\n500,20,80\n").unwrap();
    let err = load_csv(&path, &features(), "length_nm").unwrap_err();
    assert!(matches!(err, smote_reg::Error::MissingColumn(c) if c == "s_amount_mg"));

    std::fs::write(&path, "core_edge_nm,core_amount_nmol,s_amount_mg,length_nm\n500,20,x,80\n").unwrap();
    let err = load_csv(&path, &features(), "length_nm").unwrap_err();
    assert!(matches!(err, smote_reg::Error::BadCell { row: 1, .. }));
}
