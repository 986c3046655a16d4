//! Parallel evaluation and trace files.

use std::time::Instant;

use ctune_core::corpus::Split;
use ctune_core::fusion::Artifacts;
use ctune_core::pipeline::{
    collect_run, Clock, CorpusIndex, Pipeline, PipelineConfig, PipelineError, PipelineRun,
    PipelineTrace, Planner,
};
use ctune_core::{Plan, RankedList};
use rayon::prelude::*;
use serde::Serialize;

/// Milliseconds since construction.
pub struct WallClock(Instant);

impl WallClock {
    pub fn new() -> Self {
        Self(Instant::now())
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn now_ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1000.0
    }
}

/// Runs every query of `split` on a pool of `threads` workers (0 picks the
/// number of CPUs). Results come back in query order regardless of
/// scheduling, so the run equals the sequential one.
pub fn run_parallel(
    index: &CorpusIndex<'_>,
    split: Split,
    cfg: &PipelineConfig,
    art: &Artifacts<'_>,
    planner: &(dyn Planner + Sync),
    clock: &(dyn Clock + Sync),
    threads: usize,
) -> Result<PipelineRun, PipelineError> {
    let pipe = Pipeline::new(index, cfg.clone(), art.clone())?;
    let queries: Vec<_> = index.corpus.queries_in(split).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| PipelineError::Config(format!("thread pool: {e}")))?;
    let outcomes = pool.install(|| {
        queries
            .par_iter()
            .map(|q| pipe.run_query(q, planner, clock))
            .collect::<Result<Vec<_>, _>>()
    })?;
    collect_run(outcomes)
}

/// A trace as written to disk; timings go to a separate file.
#[derive(Debug, Serialize)]
struct TraceLine<'a> {
    query_id: &'a str,
    retrieved_context: &'a RankedList,
    retrieved_tools: &'a RankedList,
    plan: &'a Plan,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

/// Traces as JSON lines, without timings.
pub fn traces_jsonl(traces: &[PipelineTrace]) -> Vec<u8> {
    let mut out = Vec::new();
    for t in traces {
        let line = TraceLine {
            query_id: &t.query_id,
            retrieved_context: &t.retrieved_context,
            retrieved_tools: &t.retrieved_tools,
            plan: &t.plan,
            error: t.error.as_deref(),
        };
        serde_json::to_writer(&mut out, &line).expect("traces serialize");
        out.push(b'\n');
    }
    out
}

/// Stage timings as CSV: `mode,query_id,context_ms,tools_ms,plan_ms`.
pub fn timings_csv<'a>(runs: impl IntoIterator<Item = (&'a str, &'a [PipelineTrace])>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["mode", "query_id", "context_ms", "tools_ms", "plan_ms"])
        .expect("writing to memory cannot fail");
    for (mode, traces) in runs {
        for t in traces {
            let ms = |v: f64| format!("{v:.3}");
            w.write_record([
                mode,
                &t.query_id,
                &ms(t.timings.context_ms),
                &ms(t.timings.tools_ms),
                &ms(t.timings.plan_ms),
            ])
            .expect("writing to memory cannot fail");
        }
    }
    w.into_inner().expect("writing to memory cannot fail")
}
