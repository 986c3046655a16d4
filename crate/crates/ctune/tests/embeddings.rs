use std::collections::BTreeMap;

use ctune::core::Embedding;
use ctune::embeddings::{format_embeddings, load_embeddings, parse_embeddings, EmbeddingsError};

#[test]
fn two_records_of_four_dims() {
    let m = parse_embeddings("a\t1,0,0,0\nb\t0,2,0,0\n").unwrap();
    assert_eq!(m.len(), 2);
    assert!(m.values().all(|e| e.dims() == 4));
}

#[test]
fn ragged_record_names_its_line() {
    let err = parse_embeddings("a\t1,0,0,0\nb\t0,1,0,0\nc\t1,2,3\n").unwrap_err();
    assert_eq!(err.0, 3);
    assert!(err.1.contains("3 values"), "{}", err.1);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vectors.tsv");
    std::fs::write(&path, "a\t1,0,0,0\nb\t1,2,3\n").unwrap();
    match load_embeddings(&path) {
        Err(EmbeddingsError::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn three_four_five() {
    let m = parse_embeddings("x\t3,4,0,0\n").unwrap();
    let v = m["x"].values();
    let want = [0.6, 0.8, 0.0, 0.0];
    for (a, b) in v.iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!((m["x"].norm() - 1.0).abs() < 1e-12);
}

#[test]
fn malformed_lines() {
    assert_eq!(parse_embeddings("novalues\n").unwrap_err().0, 1);
    assert_eq!(parse_embeddings("a\t1,x\n").unwrap_err().0, 1);
    assert_eq!(parse_embeddings("a\t1,0\na\t0,1\n").unwrap_err().0, 2);
    assert_eq!(parse_embeddings("a\t1,NaN\n").unwrap_err().0, 1);
    assert!(parse_embeddings("\n\n").unwrap().is_empty());
}

#[test]
fn format_round_trips_normalized_vectors() {
    let mut m = BTreeMap::new();
    m.insert(
        "b".to_string(),
        Embedding::normalized(vec![1.0, 2.0, 2.0, 0.0]).unwrap(),
    );
    m.insert(
        "a".to_string(),
        Embedding::normalized(vec![0.0, 0.0, 0.0, 5.0]).unwrap(),
    );
    let text = format_embeddings(&m);
    assert!(text.starts_with("a\t"));
    assert_eq!(parse_embeddings(&text).unwrap(), m);
}
