use fourn::io::write_csv;
use fourn::model::{prepare, FittedModel, ModelSettings};
use fourn_core::simulate::sim_gp;
use fourn_core::{CovParams, FeatureKind, Location, LossSpec, TrainConfig};
use fourn_core::metrics::mse;

fn settings() -> ModelSettings {
    ModelSettings {
        architecture: vec![100, 8],
        fit_budget: 200,
        train: TrainConfig { epochs: 5, ..TrainConfig::default() },
        ..ModelSettings::default()
    }
}

#[test]
fn saved_model_predicts_identically_after_loading() {
    let dir = tempfile::tempdir().unwrap();
    let ds = sim_gp(250, CovParams::benchmark(), 12).unwrap();
    let s = settings();
    let prep = prepare(&ds, &s).unwrap();
    let model = prep.train(FeatureKind::KrigingPlusNp, LossSpec::Squared, &s.architecture, &s.train).unwrap();
    let path = dir.path().join("model.json");
    model.save(&path).unwrap();
    let back = FittedModel::load(&path).unwrap();
    let sites: Vec<Location> = (0..20).map(|i| Location::new(i as f64 / 19.0, 0.3)).collect();
    assert_eq!(model.predict(&sites).unwrap(), back.predict(&sites).unwrap());
    let imp = back.grouped_importance().unwrap();
    assert_eq!(imp.len(), 12);
    assert!((imp.iter().map(|(_, v)| v).sum::<f64>() - 1.0).abs() < 1e-10);
}

#[test]
fn corrupted_model_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let ds = sim_gp(120, CovParams::benchmark(), 13).unwrap();
    let s = settings();
    let model = prepare(&ds, &s)
        .unwrap()
        .train(FeatureKind::KrigingOnly, LossSpec::Squared, &s.architecture, &s.train)
        .unwrap();
    let path = dir.path().join("m.json");
    model.save(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, text.replace("fourn-model", "other-model")).unwrap();
    assert!(FittedModel::load(&bad).is_err());
    std::fs::write(&bad, &text[..text.len() / 2]).unwrap();
    assert!(FittedModel::load(&bad).is_err());
    // The data file is not a model.
    let csv = dir.path().join("d.csv");
    write_csv(&csv, &ds).unwrap();
    assert!(FittedModel::load(&csv).is_err());
}

#[test]
fn metrics_ignore_test_site_order() {
    let ds = sim_gp(300, CovParams::benchmark(), 14).unwrap();
    let train = ds.subset(&(0..250).collect::<Vec<_>>());
    let test = ds.subset(&(250..300).collect::<Vec<_>>());
    let s = settings();
    let prep = prepare(&train, &s).unwrap();
    let model = prep.train(FeatureKind::KrigingPlusNp, LossSpec::Squared, &s.architecture, &s.train).unwrap();
    let forward = model.predict(test.locations()).unwrap();
    let rev: Vec<usize> = (0..test.len()).rev().collect();
    let flipped = test.subset(&rev);
    let backward = model.predict(flipped.locations()).unwrap();
    let a = mse(test.responses(), &forward).unwrap();
    let b = mse(flipped.responses(), &backward).unwrap();
    assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    for (i, &j) in rev.iter().enumerate() {
        assert_eq!(backward[i], forward[j]);
    }
}
