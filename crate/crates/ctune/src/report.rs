//! Evaluation reports: a long-form CSV for scripts and an aligned text
//! table for people. Both come from the same rows.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ctune_core::metrics::StageSummary;
use ctune_core::EvalReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("corpus hash mismatch: {first} vs {other} ({})", path.display())]
    HashMismatch {
        first: String,
        other: String,
        path: PathBuf,
    },
    #[error("no report rows to merge")]
    Empty,
    #[error("run has no {0} metrics")]
    MissingStage(&'static str),
}

/// Which part of the pipeline a report column measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Context,
    Tools,
    E2e,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::Context, Stage::Tools, Stage::E2e];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Context => "context",
            Stage::Tools => "tools",
            Stage::E2e => "e2e",
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| format!("unknown stage `{s}` (expected context, tools or e2e)"))
    }
}

/// One value: `metric` of `mode` at cutoff `k` (empty for plan metrics).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub corpus_hash: String,
    pub stage: String,
    pub mode: String,
    pub metric: String,
    pub k: Option<usize>,
    pub value: f64,
}

fn stage_rows(out: &mut Vec<ReportRow>, base: &ReportRow, s: &StageSummary) {
    for (metric, values) in [("recall", &s.recall), ("ndcg", &s.ndcg)] {
        for (&k, &value) in values {
            out.push(ReportRow {
                metric: metric.into(),
                k: Some(k),
                value,
                ..base.clone()
            });
        }
    }
}

/// Rows of one run. The context and tools stages report Recall@K then
/// NDCG@K; the end-to-end stage reports the three plan metrics.
pub fn rows_for(
    corpus_hash: &str,
    stage: Stage,
    mode: &str,
    report: &EvalReport,
) -> Result<Vec<ReportRow>, ReportError> {
    let base = ReportRow {
        corpus_hash: corpus_hash.into(),
        stage: stage.as_str().into(),
        mode: mode.into(),
        metric: String::new(),
        k: None,
        value: 0.0,
    };
    let mut out = Vec::new();
    match stage {
        Stage::Context => {
            let s = report
                .context
                .as_ref()
                .ok_or(ReportError::MissingStage("context"))?;
            stage_rows(&mut out, &base, s);
        }
        Stage::Tools => {
            let s = report
                .tools
                .as_ref()
                .ok_or(ReportError::MissingStage("tools"))?;
            stage_rows(&mut out, &base, s);
        }
        Stage::E2e => {
            let p = report.plan.ok_or(ReportError::MissingStage("plan"))?;
            for (metric, value) in [
                ("ast_accuracy", p.ast_accuracy),
                ("exact_match", p.exact_match),
                ("hallucination", p.hallucination),
            ] {
                out.push(ReportRow {
                    metric: metric.into(),
                    value,
                    ..base.clone()
                });
            }
        }
    }
    Ok(out)
}

pub fn write_csv(rows: &[ReportRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("writing to memory cannot fail");
    }
    w.into_inner().expect("writing to memory cannot fail")
}

pub fn read_csv(path: &Path) -> Result<Vec<ReportRow>, ReportError> {
    let wrap = |source| ReportError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    r.deserialize().collect::<Result<_, _>>().map_err(wrap)
}

/// Merges runs by `(stage, mode, metric, k)`, keeping first-appearance
/// order; a later run's value replaces an earlier one. All rows must come
/// from the same corpus.
pub fn merge(inputs: &[(PathBuf, Vec<ReportRow>)]) -> Result<Vec<ReportRow>, ReportError> {
    let first = inputs
        .iter()
        .flat_map(|(_, rows)| rows.first())
        .next()
        .ok_or(ReportError::Empty)?
        .corpus_hash
        .clone();
    let mut out: Vec<ReportRow> = Vec::new();
    for (path, rows) in inputs {
        for r in rows {
            if r.corpus_hash != first {
                return Err(ReportError::HashMismatch {
                    first,
                    other: r.corpus_hash.clone(),
                    path: path.clone(),
                });
            }
            let same = |o: &&mut ReportRow| {
                o.stage == r.stage && o.mode == r.mode && o.metric == r.metric && o.k == r.k
            };
            match out.iter_mut().find(|o| same(o)) {
                Some(o) => o.value = r.value,
                None => out.push(r.clone()),
            }
        }
    }
    Ok(out)
}

fn column_label(metric: &str, k: Option<usize>) -> String {
    let name = match metric {
        "recall" => "Recall",
        "ndcg" => "NDCG",
        "ast_accuracy" => "AST acc",
        "exact_match" => "Exact",
        "hallucination" => "Halluc",
        other => other,
    };
    match k {
        Some(k) => format!("{name}@{k}"),
        None => name.to_string(),
    }
}

/// Fixed-width tables, one per stage: a row per mode and a column per
/// metric and cutoff, values in percent.
pub fn format_table(rows: &[ReportRow]) -> String {
    let mut s = String::new();
    let mut stages: Vec<&str> = Vec::new();
    for r in rows {
        if !stages.contains(&r.stage.as_str()) {
            stages.push(&r.stage);
        }
    }
    if let Some(hash) = rows.first().map(|r| &r.corpus_hash) {
        writeln!(s, "corpus {hash}").unwrap();
    }
    for stage in stages {
        let rows: Vec<&ReportRow> = rows.iter().filter(|r| r.stage == stage).collect();
        let mut modes: Vec<&str> = Vec::new();
        let mut cols: Vec<(&str, Option<usize>)> = Vec::new();
        for r in &rows {
            if !modes.contains(&r.mode.as_str()) {
                modes.push(&r.mode);
            }
            if !cols.contains(&(r.metric.as_str(), r.k)) {
                cols.push((&r.metric, r.k));
            }
        }
        let labels: Vec<String> = cols.iter().map(|(m, k)| column_label(m, *k)).collect();
        let mode_w = modes
            .iter()
            .map(|m| m.len())
            .chain([stage.len()])
            .max()
            .unwrap_or(0);
        let widths: Vec<usize> = labels.iter().map(|l| l.len().max(6)).collect();

        s.push('\n');
        write!(s, "{stage:<mode_w$}").unwrap();
        for (l, w) in labels.iter().zip(&widths) {
            write!(s, "  {l:>w$}").unwrap();
        }
        s.push('\n');
        let total = mode_w + widths.iter().map(|w| w + 2).sum::<usize>();
        writeln!(s, "{}", "-".repeat(total)).unwrap();
        for mode in &modes {
            write!(s, "{mode:<mode_w$}").unwrap();
            for ((metric, k), w) in cols.iter().zip(&widths) {
                let cell = rows
                    .iter()
                    .find(|r| r.mode == *mode && r.metric == *metric && r.k == *k)
                    .map_or("-".to_string(), |r| format!("{:.2}", r.value));
                write!(s, "  {cell:>w$}").unwrap();
            }
            s.push('\n');
        }
        if cols.iter().any(|(m, _)| *m == "recall") {
            s.push_str(
                "* Recall@K divides by the number of gold items, so a query with more gold \
                 items than K cannot reach 100.\n",
            );
        }
    }
    s
}
