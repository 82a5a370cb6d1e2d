use fourn::io::{load_csv, load_sites, write_csv, write_potts_csv, write_predictions};
use fourn::FournError;
use fourn_core::simulate::{sim_gp, sim_maxstable, sim_potts, GevMargins, PottsConfig};
use fourn_core::{CovParams, Location};

#[test]
fn simulate_write_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (name, ds) in [
        ("gp", sim_gp(300, CovParams::benchmark(), 4).unwrap()),
        ("maxstable", sim_maxstable(100, 0.5, GevMargins::default(), 4).unwrap()),
    ] {
        let path = dir.path().join(format!("{name}.csv"));
        write_csv(&path, &ds).unwrap();
        let back = load_csv(&path).unwrap();
        assert_eq!(back.len(), ds.len());
        for (a, b) in ds.locations().iter().zip(back.locations()) {
            assert!((a.x - b.x).abs() <= 1e-12 && (a.y - b.y).abs() <= 1e-12);
        }
        for (a, b) in ds.responses().iter().zip(back.responses()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn potts_file_has_a_label_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("potts.csv");
    let s = sim_potts(50, PottsConfig { sweeps: 5, ..Default::default() }, 2).unwrap();
    write_potts_csv(&path, &s).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("x,y,value,label\n"));
    assert_eq!(text.lines().count(), 51);
    assert!(load_csv(&path).is_err());
}

#[test]
fn duplicate_rows_name_both_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.csv");
    std::fs::write(&path, "x,y,value\n0.1,0.2,1\n0.3,0.4,2\n0.5,0.5,3\n0.3,0.4,9\n").unwrap();
    match load_csv(&path) {
        Err(FournError::DuplicateLocation { first, second, .. }) => assert_eq!((first, second), (3, 5)),
        other => panic!("{other:?}"),
    }
    let msg = load_csv(&path).unwrap_err().to_string();
    assert!(msg.contains("lines 3 and 5"), "{msg}");
}

#[test]
fn malformed_and_headerless_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,y,value\n0,0,1\n0.5,abc,2\n").unwrap();
    assert!(matches!(load_csv(&bad), Err(FournError::Parse { line: 3, .. })));
    let bare = dir.path().join("bare.csv");
    std::fs::write(&bare, "0,0,1\n0.5,0.5,2\n").unwrap();
    assert!(matches!(load_csv(&bare), Err(FournError::MissingHeader { .. })));
}

#[test]
fn sites_with_and_without_truth() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    std::fs::write(&a, "x,y\n0.1,0.2\n0.3,0.4\n").unwrap();
    let (locs, truth) = load_sites(&a).unwrap();
    assert_eq!(locs, vec![Location::new(0.1, 0.2), Location::new(0.3, 0.4)]);
    assert!(truth.is_none());
    let out = dir.path().join("p.csv");
    write_predictions(&out, &locs, None, &[1.5, -2.0]).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "x,y,truth,pred\n0.1,0.2,,1.5\n0.3,0.4,,-2\n");
}
