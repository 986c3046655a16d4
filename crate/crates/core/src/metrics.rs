//! Retrieval and planning metrics plus report aggregation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::Plan;
use crate::math;
use crate::retrieval::RankedList;

/// Cutoffs reported for every retrieval stage unless a caller asks for others.
pub const REPORT_KS: [usize; 4] = [1, 3, 5, 10];

/// Api name a planner emits when no tool fits. Never counted as hallucinated.
pub const DEFAULT_API: &str = "default";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("gold set of query `{0}` is empty")]
    EmptyGold(String),
    #[error("cannot aggregate an empty record set")]
    NoRecords,
    #[error("records disagree on {0}")]
    Inconsistent(String),
}

/// Relevance labels for one query: binary by default, graded when given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalJudgment {
    pub query_id: String,
    pub gold_ids: BTreeSet<String>,
    pub graded: Option<BTreeMap<String, u32>>,
}

impl RetrievalJudgment {
    pub fn binary<I, S>(query_id: impl Into<String>, gold: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            query_id: query_id.into(),
            gold_ids: gold.into_iter().map(Into::into).collect(),
            graded: None,
        }
    }

    /// Graded labels; ids with a grade above 0 form the gold set.
    pub fn graded<I, S>(query_id: impl Into<String>, grades: I) -> Self
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let graded: BTreeMap<String, u32> =
            grades.into_iter().map(|(id, g)| (id.into(), g)).collect();
        Self {
            query_id: query_id.into(),
            gold_ids: graded
                .iter()
                .filter(|(_, &g)| g > 0)
                .map(|(id, _)| id.clone())
                .collect(),
            graded: Some(graded),
        }
    }

    pub fn relevance(&self, id: &str) -> u32 {
        match &self.graded {
            Some(g) => g.get(id).copied().unwrap_or(0),
            None => u32::from(self.gold_ids.contains(id)),
        }
    }

    fn ideal_grades(&self) -> Vec<u32> {
        let mut grades: Vec<u32> = match &self.graded {
            Some(g) => g.values().copied().filter(|&v| v > 0).collect(),
            None => alloc::vec![1; self.gold_ids.len()],
        };
        grades.sort_unstable_by(|a, b| b.cmp(a));
        grades
    }
}

/// Fraction of `gold` found in the top `k` of `ranked`.
pub fn recall_at_k(
    ranked: &RankedList,
    gold: &BTreeSet<String>,
    k: usize,
) -> Result<f64, MetricsError> {
    if k == 0 {
        return Err(MetricsError::ZeroK);
    }
    if gold.is_empty() {
        return Err(MetricsError::EmptyGold(String::new()));
    }
    let hits = ranked
        .top(k)
        .iter()
        .filter(|e| gold.contains(&e.id))
        .count();
    Ok(hits as f64 / gold.len() as f64)
}

/// Exponential gain `2^rel - 1`.
pub fn gain(rel: u32) -> f64 {
    math::powi2(rel) - 1.0
}

/// DCG of a grade sequence cut at `k`.
pub fn dcg_at_k(grades: &[u32], k: usize) -> f64 {
    grades
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, &g)| gain(g) * math::discount(i + 1))
        .sum()
}

/// NDCG@k with exponential gain; a query without relevant items scores 0.
pub fn ndcg_at_k(
    ranked: &RankedList,
    judgment: &RetrievalJudgment,
    k: usize,
) -> Result<f64, MetricsError> {
    if k == 0 {
        return Err(MetricsError::ZeroK);
    }
    let idcg = dcg_at_k(&judgment.ideal_grades(), k);
    if idcg == 0.0 {
        return Ok(0.0);
    }
    let grades: Vec<u32> = ranked
        .top(k)
        .iter()
        .map(|e| judgment.relevance(&e.id))
        .collect();
    Ok(dcg_at_k(&grades, k) / idcg)
}

/// Result of comparing a predicted plan with the gold plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AstOutcome {
    pub exact: bool,
    pub ast_correct: bool,
    pub hallucinated: bool,
}

fn normalize(plan: &Plan) -> Plan {
    Plan {
        api: plan.api.trim().to_lowercase(),
        args: plan
            .args
            .iter()
            .map(|(k, v)| (k.trim().to_lowercase(), v.trim().to_lowercase()))
            .collect(),
    }
}

/// AST comparison of `pred` against `gold`.
///
/// Both plans are normalized (api lowercased, keys and values trimmed and
/// lowercased). The plan is correct when the api matches, every gold
/// argument is reproduced, and any extra argument is empty. A plan is
/// hallucinated when its api is neither in `toolbox` nor the `default`
/// fallback; an empty api (an unparseable plan) names no tool and is not.
pub fn ast_match(pred: &Plan, gold: &Plan, toolbox: &BTreeSet<String>) -> AstOutcome {
    let p = normalize(pred);
    let g = normalize(gold);
    let hallucinated = !p.api.is_empty()
        && p.api != DEFAULT_API
        && !toolbox.iter().any(|t| t.to_lowercase() == p.api);
    let args_ok = g.args.iter().all(|(k, v)| p.args.get(k) == Some(v))
        && p.args
            .iter()
            .all(|(k, v)| g.args.contains_key(k) || v.is_empty());
    let ast_correct = !hallucinated && p.api == g.api && args_ok;
    let exact = ast_correct && p.canonical() == g.canonical();
    AstOutcome {
        exact,
        ast_correct,
        hallucinated,
    }
}

/// Pairs a predicted plan with its gold plan.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanJudgment {
    pub query_id: String,
    pub predicted: Plan,
    pub gold: Plan,
}

/// Recall and NDCG of one ranked list at several cutoffs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageScores {
    pub recall: BTreeMap<usize, f64>,
    pub ndcg: BTreeMap<usize, f64>,
}

impl StageScores {
    pub fn compute(
        ranked: &RankedList,
        judgment: &RetrievalJudgment,
        ks: &[usize],
    ) -> Result<Self, MetricsError> {
        if judgment.gold_ids.is_empty() {
            return Err(MetricsError::EmptyGold(judgment.query_id.clone()));
        }
        let mut recall = BTreeMap::new();
        let mut ndcg = BTreeMap::new();
        for &k in ks {
            recall.insert(k, recall_at_k(ranked, &judgment.gold_ids, k)?);
            ndcg.insert(k, ndcg_at_k(ranked, judgment, k)?);
        }
        Ok(Self { recall, ndcg })
    }
}

/// Everything measured for one query. Stages that did not run are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub query_id: String,
    pub context: Option<StageScores>,
    pub tools: Option<StageScores>,
    pub plan: Option<AstOutcome>,
}

/// Mean Recall@K / NDCG@K in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub recall: BTreeMap<usize, f64>,
    pub ndcg: BTreeMap<usize, f64>,
}

/// Plan metrics in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub ast_accuracy: f64,
    pub exact_match: f64,
    pub hallucination: f64,
}

/// Aggregated metrics, every value a percentage rounded to 2 decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_queries: usize,
    pub context: Option<StageSummary>,
    pub tools: Option<StageSummary>,
    pub plan: Option<PlanSummary>,
}

/// Rounds a fraction to a percentage with two decimals.
pub fn percent(fraction: f64) -> f64 {
    math::round(fraction * 10_000.0) / 100.0
}

fn summarize<'a, I>(stages: I, n: usize, what: &str) -> Result<Option<StageSummary>, MetricsError>
where
    I: Iterator<Item = Option<&'a StageScores>>,
{
    let mut sums: Option<(BTreeMap<usize, f64>, BTreeMap<usize, f64>)> = None;
    let mut seen = 0usize;
    for s in stages.flatten() {
        seen += 1;
        match &mut sums {
            None => sums = Some((s.recall.clone(), s.ndcg.clone())),
            Some((r, d)) => {
                if !r.keys().eq(s.recall.keys()) || !d.keys().eq(s.ndcg.keys()) {
                    return Err(MetricsError::Inconsistent(what.to_string() + " cutoffs"));
                }
                for (k, v) in &s.recall {
                    *r.get_mut(k).unwrap() += v;
                }
                for (k, v) in &s.ndcg {
                    *d.get_mut(k).unwrap() += v;
                }
            }
        }
    }
    if seen != 0 && seen != n {
        return Err(MetricsError::Inconsistent(what.to_string() + " presence"));
    }
    Ok(sums.map(|(r, d)| StageSummary {
        recall: r
            .into_iter()
            .map(|(k, v)| (k, percent(v / n as f64)))
            .collect(),
        ndcg: d
            .into_iter()
            .map(|(k, v)| (k, percent(v / n as f64)))
            .collect(),
    }))
}

/// Means over queries. Refuses an empty record set and records that
/// disagree on which stages ran or at which cutoffs.
pub fn aggregate(records: &[QueryRecord]) -> Result<EvalReport, MetricsError> {
    let n = records.len();
    if n == 0 {
        return Err(MetricsError::NoRecords);
    }
    let context = summarize(records.iter().map(|r| r.context.as_ref()), n, "context")?;
    let tools = summarize(records.iter().map(|r| r.tools.as_ref()), n, "tools")?;
    let plans: Vec<&AstOutcome> = records.iter().filter_map(|r| r.plan.as_ref()).collect();
    let plan = match plans.len() {
        0 => None,
        m if m == n => {
            let frac = |f: fn(&AstOutcome) -> bool| {
                percent(plans.iter().filter(|o| f(o)).count() as f64 / n as f64)
            };
            Some(PlanSummary {
                ast_accuracy: frac(|o| o.ast_correct),
                exact_match: frac(|o| o.exact),
                hallucination: frac(|o| o.hallucinated),
            })
        }
        _ => return Err(MetricsError::Inconsistent("plan presence".into())),
    };
    Ok(EvalReport {
        n_queries: n,
        context,
        tools,
        plan,
    })
}
