use std::path::PathBuf;

use ctune::core::metrics::RetrievalJudgment;
use ctune::core::metrics::{aggregate, AstOutcome, QueryRecord, StageScores};
use ctune::core::{EvalReport, RankedList};
use ctune::report::{
    format_table, merge, read_csv, rows_for, write_csv, ReportError, ReportRow, Stage,
};

fn report() -> EvalReport {
    let judgment = RetrievalJudgment::binary("q1", ["a", "b"]);
    let ranked = RankedList::from_order(["a", "c", "b"]).unwrap();
    let scores = StageScores::compute(&ranked, &judgment, &[1, 3]).unwrap();
    let rec = QueryRecord {
        query_id: "q1".into(),
        context: Some(scores.clone()),
        tools: Some(scores),
        plan: Some(AstOutcome {
            exact: true,
            ast_correct: true,
            hallucinated: false,
        }),
    };
    aggregate(&[rec]).unwrap()
}

fn rows(hash: &str, stage: Stage, mode: &str) -> Vec<ReportRow> {
    rows_for(hash, stage, mode, &report()).unwrap()
}

#[test]
fn context_rows_are_recall_then_ndcg_per_k() {
    let r = rows("h", Stage::Context, "bm25");
    let keys: Vec<(&str, Option<usize>)> = r.iter().map(|r| (r.metric.as_str(), r.k)).collect();
    assert_eq!(
        keys,
        [
            ("recall", Some(1)),
            ("recall", Some(3)),
            ("ndcg", Some(1)),
            ("ndcg", Some(3))
        ]
    );
    assert_eq!(r[0].value, 50.0);
    assert_eq!(r[1].value, 100.0);
}

#[test]
fn e2e_rows_are_the_plan_metrics() {
    let r = rows("h", Stage::E2e, "rag");
    let names: Vec<&str> = r.iter().map(|r| r.metric.as_str()).collect();
    assert_eq!(names, ["ast_accuracy", "exact_match", "hallucination"]);
    assert!(r.iter().all(|r| r.k.is_none()));
    assert_eq!(r[0].value, 100.0);
}

#[test]
fn missing_stage_is_refused() {
    let mut rep = report();
    rep.context = None;
    assert!(matches!(
        rows_for("h", Stage::Context, "x", &rep),
        Err(ReportError::MissingStage(_))
    ));
}

#[test]
fn csv_round_trip() {
    let mut r = rows("abc", Stage::Tools, "oracle");
    r.extend(rows("abc", Stage::E2e, "oracle"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    std::fs::write(&path, write_csv(&r)).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("corpus_hash,stage,mode,metric,k,value\n"));
    assert!(
        text.contains("abc,e2e,oracle,ast_accuracy,,100.0\n"),
        "{text}"
    );
    assert_eq!(read_csv(&path).unwrap(), r);
}

#[test]
fn merge_of_two_runs_on_one_corpus() {
    let a = rows("h", Stage::Context, "bm25");
    let b = rows("h", Stage::Context, "semantic");
    let merged = merge(&[
        (PathBuf::from("a"), a.clone()),
        (PathBuf::from("b"), b.clone()),
    ])
    .unwrap();
    assert_eq!(merged.len(), a.len() + b.len());
    let table = format_table(&merged);
    let body: Vec<&str> = table.lines().collect();
    assert!(body.iter().any(|l| l.starts_with("bm25 ")));
    assert!(body.iter().any(|l| l.starts_with("semantic ")));
    assert!(table.contains("Recall@1") && table.contains("NDCG@3"));
    assert!(table.contains("number of gold items"));
}

#[test]
fn merge_refuses_mismatched_corpora() {
    let a = rows("h1", Stage::Context, "bm25");
    let b = rows("h2", Stage::Context, "semantic");
    let err = merge(&[(PathBuf::from("a"), a), (PathBuf::from("b"), b)]).unwrap_err();
    assert!(matches!(err, ReportError::HashMismatch { .. }), "{err}");
}

#[test]
fn single_input_passes_through() {
    let a = rows("h", Stage::E2e, "upper-bound");
    assert_eq!(merge(&[(PathBuf::from("a"), a.clone())]).unwrap(), a);
}

#[test]
fn later_run_replaces_the_same_cell() {
    let a = rows("h", Stage::E2e, "rag");
    let mut b = a.clone();
    b[0].value = 12.5;
    let merged = merge(&[(PathBuf::from("a"), a), (PathBuf::from("b"), b)]).unwrap();
    assert_eq!(merged.len(), 3);
    assert_eq!(merged[0].value, 12.5);
}

#[test]
fn empty_merge_is_an_error() {
    assert!(matches!(merge(&[]), Err(ReportError::Empty)));
}

#[test]
fn table_columns_line_up() {
    let mut r = rows("h", Stage::E2e, "lower-bound");
    r.extend(rows("h", Stage::E2e, "rag"));
    let table = format_table(&r);
    let lines: Vec<&str> = table
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with("corpus"))
        .collect();
    let width = lines[0].len();
    assert!(lines.iter().all(|l| l.len() == width), "{table}");
    assert!(table.contains("100.00"));
}
