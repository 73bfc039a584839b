use smote_reg::dataset::{kfold_split, synth_benchmark, NanorodTarget};
use smote_reg::eval::{check_power_mean, compute_metrics, cross_validate, evaluate_holdout, evaluate_in_training};
use smote_reg::model::{train, TrainConfig};
use smote_reg::oversample::{smote_reg, SmoteConfig};
use smote_reg::seed;

fn quick() -> TrainConfig {
    TrainConfig { epochs: 40, seed: 3, ..Default::default() }
}

#[test]
fn hand_computed_triple() {
    let m = compute_metrics(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
    assert!((m.mae - 2.0 / 3.0).abs() < 1e-12);
    assert!((m.mse - 2.0 / 3.0).abs() < 1e-12);
    assert!(m.r2.unwrap().abs() < 1e-12);
    check_power_mean(&m).unwrap();
}

#[test]
fn folds_reproduce_and_reaggregate() {
    let data = synth_benchmark(60, 2, NanorodTarget::Width).unwrap();
    let report = cross_validate(&data, 5, &quick(), 11).unwrap();
    assert_eq!(report.per_fold.len(), 5);
    assert_eq!(report.fold_sizes.iter().sum::<usize>(), 60);

    // retrain each fold independently from the published seeds
    let plan = kfold_split(60, 5, seed::derive(11, 0)).unwrap();
    for (f, m) in report.per_fold.iter().enumerate() {
        let cfg = TrainConfig { seed: report.fold_seeds[f], ..quick() };
        let (model, _) = train(&data.subset(&plan.train_indices(f)).unwrap(), &cfg).unwrap();
        let held = data.subset(&plan.test_indices(f)).unwrap();
        let again = compute_metrics(&model.predict_dataset(&held).unwrap(), &held.targets()).unwrap();
        assert_eq!(&again, m);
        check_power_mean(m).unwrap();
    }

    let k = report.per_fold.len() as f64;
    let mean = |v: Vec<f64>| v.iter().sum::<f64>() / k;
    let std = |v: Vec<f64>| {
        let m = mean(v.clone());
        (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / k).sqrt()
    };
    let maes: Vec<f64> = report.per_fold.iter().map(|m| m.mae).collect();
    let mses: Vec<f64> = report.per_fold.iter().map(|m| m.mse).collect();
    let r2s: Vec<f64> = report.per_fold.iter().map(|m| m.r2.unwrap()).collect();
    assert!((report.mean.mae - mean(maes.clone())).abs() < 1e-12);
    assert!((report.mean.mse - mean(mses.clone())).abs() < 1e-12);
    assert!((report.mean.r2.unwrap() - mean(r2s.clone())).abs() < 1e-12);
    assert!((report.std.mae - std(maes)).abs() < 1e-12);
    assert!((report.std.mse - std(mses)).abs() < 1e-12);
    assert!((report.std.r2.unwrap() - std(r2s)).abs() < 1e-12);

    assert_eq!(report, cross_validate(&data, 5, &quick(), 11).unwrap());
}

#[test]
fn original_subset_on_augmented_data() {
    let data = synth_benchmark(8, 5, NanorodTarget::Length).unwrap();
    let aug = smote_reg(&data, &SmoteConfig { seed: 1, ..Default::default() }).unwrap().dataset;
    let report = cross_validate(&aug, 4, &quick(), 2).unwrap();
    let orig = report.original_subset.unwrap();
    assert!(orig.is_finite());
    check_power_mean(&orig).unwrap();
    let (_, in_training) = evaluate_in_training(&aug, &quick()).unwrap();
    check_power_mean(&in_training.unwrap()).unwrap();
}

#[test]
fn holdout_rows_are_scored() {
    let data = synth_benchmark(40, 6, NanorodTarget::AspectRatio).unwrap();
    let holdout = synth_benchmark(3, 7, NanorodTarget::AspectRatio).unwrap();
    let (model, _) = train(&data, &quick()).unwrap();
    let report = evaluate_holdout(&model, &holdout).unwrap();
    assert_eq!(report.rows.len(), 3);
    for (row, y) in report.rows.iter().zip(holdout.targets()) {
        assert_eq!(row.actual, y);
        assert!(row.predicted.is_finite());
    }
    let preds: Vec<f64> = report.rows.iter().map(|r| r.predicted).collect();
    assert_eq!(report.metrics, compute_metrics(&preds, &holdout.targets()).unwrap());
}

#[test]
fn too_many_folds_is_an_error() {
    let data = synth_benchmark(5, 1, NanorodTarget::Width).unwrap();
    assert!(cross_validate(&data, 6, &quick(), 0).is_err());
    assert!(cross_validate(&data, 1, &quick(), 0).is_err());
}
