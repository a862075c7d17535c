mod common;

use common::*;
use nidsbench_core::dataset::{
    apply_encoder, fit_encoder, load_csv, load_csv_reader, IngestError, Schema, Task, CLASS_NAMES,
};
use proptest::prelude::*;

#[test]
fn fixture_loads_with_expected_shape() {
    let (train, test) = fixture_tables();
    assert_eq!(train.n_rows(), 200);
    assert_eq!(test.n_rows(), 100);
    assert_eq!(train.columns().len(), 45);
    let (x, _) = fixture_design(false);
    let multi = x.labels(Task::Multiclass);
    for c in 0..CLASS_NAMES.len() {
        assert!(multi.contains(&c), "class {} missing", CLASS_NAMES[c]);
    }
    // binary label agrees with the category
    let normal = CLASS_NAMES.iter().position(|&c| c == "Normal").unwrap();
    for (b, m) in x.labels(Task::Binary).iter().zip(&multi) {
        assert_eq!(*b == 0, *m == normal);
    }
}

#[test]
fn header_only_file_is_empty() {
    let header = std::fs::read_to_string(fixture("unsw_train.csv")).unwrap();
    let header = header.lines().next().unwrap();
    let err = load_csv_reader(header.as_bytes(), &Schema::unsw_nb15(), "mem").unwrap_err();
    assert!(matches!(err, IngestError::EmptyFile(_)));
    assert!(load_csv("/definitely/not/here.csv", &Schema::unsw_nb15()).is_err());
}

/// The fixture text with some cells of the first data row replaced.
fn patched_fixture(edits: &[(&str, &str)]) -> String {
    let text = std::fs::read_to_string(fixture("unsw_train.csv")).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let header: Vec<&str> = lines[0].split(',').collect();
    let mut row: Vec<String> = lines[1].split(',').map(str::to_string).collect();
    for (col, val) in edits {
        let i = header.iter().position(|h| h == col).unwrap();
        row[i] = val.to_string();
    }
    lines[1] = row.join(",");
    lines.join("\n")
}

#[test]
fn null_service_becomes_other() {
    for null in ["", "-"] {
        let text = patched_fixture(&[("service", null)]);
        let t = load_csv_reader(text.as_bytes(), &Schema::unsw_nb15(), "mem").unwrap();
        let spec = fit_encoder(&t, false).unwrap();
        assert!(spec.onehot_maps["service"].contains(&"other".to_string()));
        assert!(!spec.onehot_maps["service"].iter().any(|c| c.is_empty() || c == "-"));
        let x = apply_encoder(&spec, &t).unwrap();
        let i = x.feature_names.iter().position(|f| f == "service_other").unwrap();
        assert_eq!(x.values[(i, 0)], 1.0);
    }
}

#[test]
fn numeric_nulls_are_errors() {
    let text = patched_fixture(&[("sbytes", "")]);
    let err = load_csv_reader(text.as_bytes(), &Schema::unsw_nb15(), "mem").unwrap_err();
    assert!(matches!(err, IngestError::UnparseableCell { row: 1, .. }), "{err}");
}

#[test]
fn unknown_attack_category_is_rejected() {
    let text = patched_fixture(&[("attack_cat", "Phishing")]);
    assert!(load_csv_reader(text.as_bytes(), &Schema::unsw_nb15(), "mem").is_err());
}

#[test]
fn unseen_test_category_encodes_as_zeros() {
    let (train, _) = fixture_tables();
    let spec = fit_encoder(&train, true).unwrap();
    let text = patched_fixture(&[("proto", "sctp")]);
    let t = load_csv_reader(text.as_bytes(), &Schema::unsw_nb15(), "mem").unwrap();
    let x = apply_encoder(&spec, &t).unwrap();
    for (i, name) in x.feature_names.iter().enumerate() {
        if name.starts_with("proto_") {
            assert_eq!(x.values[(i, 0)], 0.0, "{name}");
        }
    }
}

#[test]
fn encoded_width_and_names() {
    let (train, test) = fixture_tables();
    let spec = fit_encoder(&train, false).unwrap();
    let n_cats: usize = spec.onehot_maps.values().map(Vec::len).sum();
    // 40 numeric columns minus `id`, plus the indicators
    assert_eq!(spec.n_features(), 39 + n_cats);
    let a = apply_encoder(&spec, &train).unwrap();
    let b = apply_encoder(&spec, &test).unwrap();
    assert_eq!(a.feature_names, b.feature_names);
    assert!(!a.feature_names.iter().any(|f| f == "id" || f == "attack_cat" || f == "label"));
    for cats in spec.onehot_maps.values() {
        assert!(cats.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn minmax_training_features_span_the_unit_interval() {
    let (x, test) = fixture_design(true);
    for i in 0..x.n_features() {
        let row = x.values.row(i);
        let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            assert_eq!((lo, hi), (0.0, 1.0), "{}", x.feature_names[i]);
        } else {
            assert_eq!(lo, 0.0);
        }
    }
    assert!(test.values.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
}

proptest! {
    #![proptest_config(pt_config(16))]

    #[test]
    fn encoding_is_deterministic_on_any_row_subset(
        rows in proptest::collection::btree_set(0usize..200, 2..60),
        minmax in any::<bool>(),
    ) {
        let (train, test) = fixture_tables();
        let rows: Vec<usize> = rows.into_iter().collect();
        let sub = train.slice_rows(&rows);
        let spec = fit_encoder(&sub, minmax).unwrap();
        let a = apply_encoder(&spec, &sub).unwrap();
        let b = apply_encoder(&spec, &sub).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.values.as_slice().iter().zip(b.values.as_slice()).all(|(x, y)| x.to_bits() == y.to_bits()));
        // the test split is encoded onto exactly the training features
        let t = apply_encoder(&spec, &test).unwrap();
        prop_assert_eq!(&t.feature_names, &a.feature_names);
        prop_assert_eq!(spec.clone(), fit_encoder(&sub, minmax).unwrap());
    }
}
