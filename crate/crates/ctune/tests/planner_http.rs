mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::{serve, Reply};
use ctune::core::corpus::Split;
use ctune::core::fusion::{Artifacts, EmbeddingConfig};
use ctune::core::pipeline::{
    run_pipeline, CorpusIndex, NoClock, PipelineConfig, PlanRequest, Planner,
};
use ctune::core::{Plan, RankedList};
use ctune::planner_http::{parse_plan, HttpPlanner, HttpPlannerConfig};
use ctune::runner::run_parallel;

fn planner(url: String, timeout_ms: u64) -> HttpPlanner {
    HttpPlanner::new(&HttpPlannerConfig {
        url,
        timeout_ms,
        max_in_flight: 2,
    })
}

/// Gold plans by query text, for an endpoint that answers perfectly.
fn gold_by_text(corpus: &ctune::core::Corpus) -> BTreeMap<String, Plan> {
    corpus
        .queries
        .iter()
        .map(|q| (q.text.clone(), q.gold_plan.clone()))
        .collect()
}

#[test]
fn request_carries_query_context_and_tools() {
    let corpus = common::small_corpus(2);
    let q = &corpus.queries[0];
    let item = &corpus.stores[0].items[0];
    let tools = RankedList::from_order([corpus.toolbox[3].name.as_str(), "not_a_tool"]).unwrap();
    let seen = Arc::new(std::sync::Mutex::new(String::new()));
    let sink = Arc::clone(&seen);
    let url = serve(move |body| {
        *sink.lock().unwrap() = body.to_string();
        Reply::Json(r#"{"api": "x", "args": {}}"#.into())
    });
    let context = [item];
    let req = PlanRequest {
        query: q,
        context: &context,
        tools: &tools,
        toolbox: &corpus.toolbox,
    };
    planner(url, 5_000).plan(&req).unwrap();
    let v: serde_json::Value = serde_json::from_str(&seen.lock().unwrap()).unwrap();
    assert_eq!(v["query"], q.text.as_str());
    assert_eq!(v["context"][0]["title"], item.title.as_str());
    assert_eq!(v["context"][0]["body"], item.body.as_str());
    let sent = v["tools"].as_array().unwrap();
    assert_eq!(sent.len(), 1);
    assert_eq!(sent[0]["name"], corpus.toolbox[3].name.as_str());
    assert!(sent[0]["params"].is_array());
}

#[test]
fn echo_of_the_gold_plan_is_an_exact_match() {
    let corpus = common::small_corpus(4);
    let gold = gold_by_text(&corpus);
    let url = serve(move |body| {
        let v: serde_json::Value = serde_json::from_str(body).unwrap();
        let plan = &gold[v["query"].as_str().unwrap()];
        Reply::Json(serde_json::to_string(plan).unwrap())
    });
    let index = CorpusIndex::build(&corpus, &EmbeddingConfig::default()).unwrap();
    let run = run_pipeline(
        &index,
        Split::Test,
        &PipelineConfig::rag(),
        &Artifacts::default(),
        &planner(url, 5_000),
        &NoClock,
    )
    .unwrap();
    let plan = run.report.plan.unwrap();
    assert_eq!(plan.exact_match, 100.0);
    assert_eq!(plan.hallucination, 0.0);
}

#[test]
fn api_outside_the_toolbox_is_hallucinated() {
    let corpus = common::small_corpus(3);
    let url = serve(|_| Reply::Json(r#"{"api": "teleport_user", "args": {"to": "mars"}}"#.into()));
    let index = CorpusIndex::build(&corpus, &EmbeddingConfig::default()).unwrap();
    let run = run_pipeline(
        &index,
        Split::Test,
        &PipelineConfig::rag(),
        &Artifacts::default(),
        &planner(url, 5_000),
        &NoClock,
    )
    .unwrap();
    let plan = run.report.plan.unwrap();
    assert_eq!(plan.hallucination, 100.0);
    assert_eq!(plan.ast_accuracy, 0.0);
}

#[test]
fn timeout_is_recorded_and_the_run_continues() {
    let corpus = common::small_corpus(3);
    let n = corpus.queries_in(Split::Test).count();
    let stall_on = corpus.queries_in(Split::Test).next().unwrap().text.clone();
    let gold = gold_by_text(&corpus);
    let url = serve(move |body| {
        let v: serde_json::Value = serde_json::from_str(body).unwrap();
        let text = v["query"].as_str().unwrap();
        if text == stall_on {
            Reply::Stall
        } else {
            Reply::Json(serde_json::to_string(&gold[text]).unwrap())
        }
    });
    let index = CorpusIndex::build(&corpus, &EmbeddingConfig::default()).unwrap();
    let run = run_parallel(
        &index,
        Split::Test,
        &PipelineConfig::rag(),
        &Artifacts::default(),
        &planner(url, 300),
        &NoClock,
        2,
    )
    .unwrap();
    assert_eq!(run.traces.len(), n);
    let failed: Vec<_> = run.traces.iter().filter(|t| t.error.is_some()).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|t| t.plan == Plan::default()));
    assert!(
        failed[0].error.as_ref().unwrap().contains("timeout"),
        "{:?}",
        failed[0].error
    );
    let bad: Vec<_> = run
        .records
        .iter()
        .filter(|r| failed.iter().any(|t| t.query_id == r.query_id))
        .collect();
    assert!(bad.iter().all(|r| !r.plan.unwrap().ast_correct));
    let correct = run
        .records
        .iter()
        .filter(|r| r.plan.unwrap().ast_correct)
        .count();
    assert_eq!(correct, n - failed.len());
}

#[test]
fn unreachable_endpoint_is_a_planner_error() {
    let corpus = common::small_corpus(1);
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/plan", listener.local_addr().unwrap());
    drop(listener);
    let tools = RankedList::from_order([corpus.toolbox[0].name.as_str()]).unwrap();
    let req = PlanRequest {
        query: &corpus.queries[0],
        context: &[],
        tools: &tools,
        toolbox: &corpus.toolbox,
    };
    assert!(planner(url, 1_000).plan(&req).is_err());
}

#[test]
fn unparseable_responses_become_the_empty_plan() {
    assert_eq!(parse_plan("not json"), None);
    assert_eq!(parse_plan(r#"{"args": {}}"#), None);
    assert_eq!(parse_plan(r#"{"api": "x", "args": {"a": [1]}}"#), None);
    let p = parse_plan(r#"{"api": "set_alarm", "args": {"hour": 7, "label": "gym", "x": null}}"#)
        .unwrap();
    assert_eq!(
        p,
        Plan::new("set_alarm")
            .arg("hour", "7")
            .arg("label", "gym")
            .arg("x", "")
    );
    assert_eq!(parse_plan(r#"{"api": "f"}"#), Some(Plan::new("f")));

    let corpus = common::small_corpus(2);
    let url = serve(|_| Reply::Json("<html>oops</html>".into()));
    let tools = RankedList::from_order([corpus.toolbox[0].name.as_str()]).unwrap();
    let req = PlanRequest {
        query: &corpus.queries[0],
        context: &[],
        tools: &tools,
        toolbox: &corpus.toolbox,
    };
    assert_eq!(planner(url, 5_000).plan(&req).unwrap(), Plan::default());
}
