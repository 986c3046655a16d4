use ctune::core::ltr::{default_schema, separable_groups, train, RoundStat, TrainConfig};
use ctune::core::LtrModel;
use ctune::model_io::{
    format_model, format_training_log, load_model, parse_model, save_model, ModelIoError,
};

fn small_model() -> LtrModel {
    let groups = separable_groups(40, 10, 3);
    let cfg = TrainConfig {
        n_trees: 8,
        ..TrainConfig::default()
    };
    train(&groups, &cfg).unwrap().model
}

#[test]
fn round_trip_is_identity() {
    let model = small_model();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.txt");
    save_model(&model, &path).unwrap();
    let back = load_model(&path, &default_schema()).unwrap();
    assert_eq!(back, model);
    assert_eq!(format_model(&back), format_model(&model));
}

#[test]
fn base_only_model_has_no_tree_lines() {
    let model = LtrModel::constant(0.5, default_schema());
    let text = format_model(&model);
    assert!(text.contains("trees 0\n"));
    assert!(!text.contains("\ntree "));
    let back = parse_model(&text, &default_schema()).unwrap();
    assert_eq!(back.score(&[0.0; 13]), 0.5);
}

#[test]
fn schema_mismatch_is_a_load_error() {
    let text = format_model(&small_model());
    let mut other = default_schema();
    other.swap(0, 1);
    assert!(matches!(
        parse_model(&text, &other),
        Err(ModelIoError::SchemaMismatch { .. })
    ));
    assert!(matches!(
        parse_model(&text, &default_schema()[..12]),
        Err(ModelIoError::SchemaMismatch { .. })
    ));
}

#[test]
fn edited_schema_line_fails_the_hash_check() {
    let text = format_model(&small_model()).replacen("bm25_score", "bm25", 1);
    assert!(matches!(
        parse_model(&text, &default_schema()),
        Err(ModelIoError::HashMismatch { .. })
    ));
}

#[test]
fn corrupted_files_are_parse_errors() {
    let text = format_model(&small_model());
    let lines: Vec<&str> = text.lines().collect();

    let line_of = |r: Result<LtrModel, ModelIoError>| match r {
        Err(ModelIoError::Parse { line, .. }) => line,
        other => panic!("expected parse error, got {other:?}"),
    };

    // a tree cut short
    let mut cut: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    let t = cut[7].rfind(" L ").unwrap();
    cut[7].truncate(t);
    assert_eq!(line_of(parse_model(&cut.join("\n"), &default_schema())), 8);

    // a missing tree
    let short = lines[..lines.len() - 1].join("\n");
    assert_eq!(line_of(parse_model(&short, &default_schema())), lines.len());

    // garbage number
    let bad = text.replacen("sigma 1.0", "sigma one", 1);
    assert_eq!(line_of(parse_model(&bad, &default_schema())), 4);

    // wrong magic
    assert_eq!(line_of(parse_model("hello 1\n", &default_schema())), 1);

    // trailing junk
    let extra = format!("{text}tree L 1.0\n");
    assert_eq!(
        line_of(parse_model(&extra, &default_schema())),
        lines.len() + 1
    );

    // feature index outside the schema
    let wild = text.replacen("tree S ", "tree S 99", 1);
    assert!(parse_model(&wild, &default_schema()).is_err());
}

#[test]
fn training_log_csv() {
    let log = [
        RoundStat {
            round: 1,
            mean_train_ndcg: 0.5,
        },
        RoundStat {
            round: 2,
            mean_train_ndcg: 0.75,
        },
    ];
    let csv = String::from_utf8(format_training_log(&log).unwrap()).unwrap();
    assert_eq!(csv, "round,mean_train_ndcg\n1,0.5\n2,0.75\n");
}
