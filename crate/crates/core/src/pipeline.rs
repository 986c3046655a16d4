//! Context tuning, then tool retrieval, then plan generation, with each
//! stage scored against the query's labels.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{
    find_field, item_fields, ContextItem, Corpus, LabeledQuery, Plan, Split, Tool,
};
use crate::fusion::{
    augment_query, federated_retrieve, Artifacts, EmbeddingConfig, FusionBackend, FusionConfig,
    FusionError, FusionMode, HabitHintAugmenter, IdentityAugmenter, PersonaContext, QueryAugmenter,
};
use crate::ltr::{GroupRow, QueryGroup};
use crate::metrics::{
    aggregate, ast_match, AstOutcome, EvalReport, MetricsError, QueryRecord, RetrievalJudgment,
    StageScores, DEFAULT_API, REPORT_KS,
};
use crate::retrieval::{
    cosine_topk, tokenize, Embedding, HashedEmbedder, RankedList, RetrievalError,
};

/// Token budget of the text used to search the toolbox.
pub const MAX_SEARCH_TOKENS: usize = 512;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("toolbox is empty")]
    EmptyToolbox,
    #[error("planner got an empty tool list")]
    EmptyToolList,
    #[error("query `{query}` names unknown persona `{persona}`")]
    UnknownPersona { query: String, persona: String },
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Failure reported by a planner for a single query.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("planner failed: {0}")]
pub struct PlannerError(pub String);

macro_rules! named_enum {
    ($ty:ident, $kind:literal, [$(($v:ident, $s:literal)),+ $(,)?]) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$v),+];

            pub fn as_str(self) -> &'static str {
                match self { $($ty::$v => $s),+ }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
        impl FromStr for $ty {
            type Err = PipelineError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($s => Ok($ty::$v),)+
                    _ => Err(PipelineError::Config(alloc::format!("unknown {} `{}`", $kind, s))),
                }
            }
        }
    };
}

/// Where the context stage gets its items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContextMode {
    None,
    Bm25,
    Semantic,
    LtrRrf,
    Oracle,
}
named_enum!(
    ContextMode,
    "context mode",
    [
        (None, "none"),
        (Bm25, "bm25"),
        (Semantic, "semantic"),
        (LtrRrf, "ltr-rrf"),
        (Oracle, "oracle"),
    ]
);

/// How the planner's candidate tools are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToolMode {
    /// The whole toolbox in catalog order; no retrieval.
    Toolbox,
    /// Cosine search over tool documents.
    Semantic,
    /// The gold tools.
    Oracle,
}
named_enum!(
    ToolMode,
    "tool mode",
    [
        (Toolbox, "toolbox"),
        (Semantic, "semantic"),
        (Oracle, "oracle"),
    ]
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerKind {
    Mock,
    External,
}
named_enum!(
    PlannerKind,
    "planner",
    [(Mock, "mock"), (External, "external")]
);

/// Query rewriting applied before context retrieval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AugmentKind {
    None,
    HabitHint,
}
named_enum!(
    AugmentKind,
    "augmenter",
    [(None, "none"), (HabitHint, "habit-hint")]
);

impl AugmentKind {
    pub fn augmenter(self) -> Box<dyn QueryAugmenter + Send + Sync> {
        match self {
            AugmentKind::None => Box::new(IdentityAugmenter),
            AugmentKind::HabitHint => Box::new(HabitHintAugmenter),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub context_mode: ContextMode,
    pub k_context: usize,
    pub k_tools: usize,
    pub tool_mode: ToolMode,
    pub planner: PlannerKind,
    pub augment: AugmentKind,
    pub fusion: FusionConfig,
    /// Cutoffs at which retrieval stages are scored.
    pub eval_ks: Vec<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            context_mode: ContextMode::LtrRrf,
            k_context: 5,
            k_tools: 3,
            tool_mode: ToolMode::Semantic,
            planner: PlannerKind::Mock,
            augment: AugmentKind::None,
            fusion: FusionConfig {
                mode: FusionMode::FuseRankers,
                ..FusionConfig::default()
            },
            eval_ks: REPORT_KS.to_vec(),
        }
    }
}

impl PipelineConfig {
    /// No retrieval at all: the planner sees the bare query and the toolbox.
    pub fn lower_bound() -> Self {
        Self {
            context_mode: ContextMode::None,
            tool_mode: ToolMode::Toolbox,
            ..Self::default()
        }
    }

    /// Plain tool retrieval from the query alone.
    pub fn rag() -> Self {
        Self {
            context_mode: ContextMode::None,
            ..Self::default()
        }
    }

    /// Learned context retrieval ahead of tool retrieval.
    pub fn context_tuned() -> Self {
        Self::default()
    }

    /// Gold context and gold tools.
    pub fn upper_bound() -> Self {
        Self {
            context_mode: ContextMode::Oracle,
            tool_mode: ToolMode::Oracle,
            ..Self::default()
        }
    }

    /// Gold context with retrieved tools.
    pub fn oracle_context() -> Self {
        Self {
            context_mode: ContextMode::Oracle,
            ..Self::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self, PipelineError> {
        match name {
            "lower-bound" => Ok(Self::lower_bound()),
            "rag" => Ok(Self::rag()),
            "context-tuned" => Ok(Self::context_tuned()),
            "upper-bound" => Ok(Self::upper_bound()),
            "oracle-context" => Ok(Self::oracle_context()),
            _ => Err(PipelineError::Config(alloc::format!(
                "unknown preset `{name}`"
            ))),
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.k_context == 0 || self.k_tools == 0 {
            return Err(PipelineError::Config(
                "k_context and k_tools must be at least 1".into(),
            ));
        }
        if self.eval_ks.is_empty() || self.eval_ks.contains(&0) {
            return Err(PipelineError::Config(
                "eval cutoffs must be nonempty and positive".into(),
            ));
        }
        self.fusion.validate()?;
        Ok(())
    }

    /// Fusion settings with the backend implied by the context mode.
    pub fn fusion_for_mode(&self) -> Option<FusionConfig> {
        let backend = match self.context_mode {
            ContextMode::None => return None,
            ContextMode::Bm25 => FusionBackend::Bm25,
            ContextMode::Semantic => FusionBackend::Semantic,
            ContextMode::LtrRrf => FusionBackend::Ltr,
            ContextMode::Oracle => FusionBackend::Oracle,
        };
        Some(FusionConfig {
            backend,
            ..self.fusion
        })
    }

    fn depth(&self, k: usize) -> usize {
        self.eval_ks.iter().copied().max().unwrap_or(k).max(k)
    }
}

/// Tool documents embedded once for cosine search.
pub struct ToolIndex {
    tools: Vec<Tool>,
    embedder: HashedEmbedder,
    embeddings: Vec<Embedding>,
}

impl ToolIndex {
    /// Embeds `name description param names` of every tool. The idf comes
    /// from the tool documents.
    pub fn build(toolbox: &[Tool], dims: usize, subwords: bool) -> Result<Self, PipelineError> {
        if toolbox.is_empty() {
            return Err(PipelineError::EmptyToolbox);
        }
        let docs: Vec<(String, String)> = toolbox
            .iter()
            .map(|t| (t.name.clone(), t.document()))
            .collect();
        let embedder = if subwords {
            HashedEmbedder::subwords(docs.iter().cloned(), dims)?
        } else {
            HashedEmbedder::words(docs.iter().cloned(), dims)?
        };
        let embeddings = docs.iter().map(|(_, d)| embedder.embed_text(d)).collect();
        Ok(Self {
            tools: toolbox.to_vec(),
            embedder,
            embeddings,
        })
    }

    pub fn tools(&self) -> &[Tool] {
        &self.tools
    }

    pub fn tool(&self, name: &str) -> Option<&Tool> {
        self.tools.iter().find(|t| t.name == name)
    }

    pub fn embed(&self, text: &str) -> Embedding {
        self.embedder.embed_text(text)
    }
}

/// The query followed by each context item's `"title. body"` in rank
/// order, cut to [`MAX_SEARCH_TOKENS`] tokens.
pub fn search_text(query_text: &str, context: &[&ContextItem]) -> String {
    let mut tokens = tokenize(query_text);
    for item in context {
        if tokens.len() >= MAX_SEARCH_TOKENS {
            break;
        }
        tokens.extend(tokenize(&item.text()));
    }
    tokens.truncate(MAX_SEARCH_TOKENS);
    tokens.join(" ")
}

/// Cosine top-`k` tools for the query enriched with `context`.
pub fn retrieve_tools(
    query: &LabeledQuery,
    context: &[&ContextItem],
    tools: &ToolIndex,
    k: usize,
) -> Result<RankedList, PipelineError> {
    let q = tools.embed(&search_text(&query.text, context));
    let cands = tools
        .tools
        .iter()
        .zip(&tools.embeddings)
        .map(|(t, e)| (t.name.as_str(), e));
    Ok(cosine_topk(&q, cands, k)?)
}

/// Deterministic stand-in for an LLM planner.
///
/// Walks `tools` in rank order and returns the first tool whose required
/// parameters can all be filled, each from the first source with a
/// matching field: the query text (as field `query`), then the context
/// items in rank order (title and tags). Returns `default` when no tool
/// can be filled. Tool names missing from `toolbox` are skipped, so the
/// result is always a toolbox api or `default`.
pub fn mock_plan(
    query: &LabeledQuery,
    context: &[&ContextItem],
    tools: &RankedList,
    toolbox: &[Tool],
) -> Result<Plan, PipelineError> {
    if tools.is_empty() {
        return Err(PipelineError::EmptyToolList);
    }
    let query_fields = [("query", query.text.as_str())];
    let context_fields: Vec<Vec<(&str, &str)>> = context.iter().map(|i| item_fields(i)).collect();
    'tools: for name in tools.ids() {
        let Some(tool) = toolbox.iter().find(|t| t.name == name) else {
            continue;
        };
        let mut plan = Plan::new(tool.name.clone());
        for p in tool.required_params() {
            let value = find_field(&p.name, &query_fields)
                .or_else(|| context_fields.iter().find_map(|f| find_field(&p.name, f)));
            match value {
                Some(v) => {
                    plan.args.insert(p.name.clone(), v.to_string());
                }
                None => continue 'tools,
            }
        }
        return Ok(plan);
    }
    Ok(Plan::new(DEFAULT_API))
}

/// What a planner sees for one query.
pub struct PlanRequest<'a> {
    pub query: &'a LabeledQuery,
    pub context: &'a [&'a ContextItem],
    pub tools: &'a RankedList,
    pub toolbox: &'a [Tool],
}

pub trait Planner {
    fn plan(&self, req: &PlanRequest<'_>) -> Result<Plan, PlannerError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MockPlanner;

impl Planner for MockPlanner {
    fn plan(&self, req: &PlanRequest<'_>) -> Result<Plan, PlannerError> {
        mock_plan(req.query, req.context, req.tools, req.toolbox)
            .map_err(|e| PlannerError(e.to_string()))
    }
}

/// Milliseconds since an arbitrary origin, used for stage timings.
pub trait Clock {
    fn now_ms(&self) -> f64;
}

/// Reports zero for every reading.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_ms(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub context_ms: f64,
    pub tools_ms: f64,
    pub plan_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub query_id: String,
    /// Context handed downstream (top `k_context`).
    pub retrieved_context: RankedList,
    /// Tools handed to the planner (top `k_tools`).
    pub retrieved_tools: RankedList,
    pub plan: Plan,
    pub timings: StageTimings,
    /// Planner failure; the query is then scored with an empty plan.
    pub error: Option<String>,
}

/// Per-persona retrieval state plus the tool index, built once per corpus.
pub struct CorpusIndex<'c> {
    pub corpus: &'c Corpus,
    personas: BTreeMap<&'c str, PersonaContext<'c>>,
    pub tools: ToolIndex,
}

impl<'c> CorpusIndex<'c> {
    pub fn build(corpus: &'c Corpus, emb: &EmbeddingConfig<'c>) -> Result<Self, PipelineError> {
        let stores = corpus.stores_by_persona();
        let mut personas = BTreeMap::new();
        for p in &corpus.personas {
            let s = stores.get(p.id.as_str()).cloned().unwrap_or_default();
            personas.insert(p.id.as_str(), PersonaContext::build(p, &s, emb)?);
        }
        let tools = ToolIndex::build(&corpus.toolbox, emb.dims, emb.subwords)?;
        Ok(Self {
            corpus,
            personas,
            tools,
        })
    }

    pub fn persona(&self, query: &LabeledQuery) -> Result<&PersonaContext<'c>, PipelineError> {
        self.personas
            .get(query.persona_id.as_str())
            .ok_or_else(|| PipelineError::UnknownPersona {
                query: query.id.clone(),
                persona: query.persona_id.clone(),
            })
    }
}

/// Training groups for the ranker: one group per query of `split`, every
/// item of the persona as a row, relevance 1 for gold context.
pub fn ltr_groups(
    index: &CorpusIndex<'_>,
    split: Split,
    augment: AugmentKind,
    art: &Artifacts<'_>,
) -> Result<Vec<QueryGroup>, PipelineError> {
    let augmenter = augment.augmenter();
    let mut groups = Vec::new();
    for q in index.corpus.queries_in(split) {
        let ctx = index.persona(q)?;
        let text = augment_query(&q.text, ctx.persona, augmenter.as_ref());
        let signals = ctx.signals(&q.id, &text, q);
        let gold: BTreeSet<&str> = q.gold_context_ids.iter().map(String::as_str).collect();
        let rows = ctx
            .items()
            .iter()
            .zip(ctx.features(&signals, &art.bm25))
            .map(|(item, features)| GroupRow {
                item_id: item.id.clone(),
                features,
                relevance: u32::from(gold.contains(item.id.as_str())),
            })
            .collect();
        groups.push(QueryGroup {
            query_id: q.id.clone(),
            rows,
        });
    }
    Ok(groups)
}

/// A validated configuration bound to a corpus index and its artifacts.
pub struct Pipeline<'a, 'c> {
    index: &'a CorpusIndex<'c>,
    cfg: PipelineConfig,
    art: Artifacts<'a>,
    augmenter: Box<dyn QueryAugmenter + Send + Sync>,
    toolbox_names: BTreeSet<String>,
}

/// Result of one query: its trace and its metric record.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryOutcome {
    pub trace: PipelineTrace,
    pub record: QueryRecord,
}

impl<'a, 'c> Pipeline<'a, 'c> {
    /// Checks the configuration and artifacts before any query runs.
    pub fn new(
        index: &'a CorpusIndex<'c>,
        cfg: PipelineConfig,
        art: Artifacts<'a>,
    ) -> Result<Self, PipelineError> {
        cfg.validate()?;
        art.bm25.validate()?;
        if cfg.context_mode == ContextMode::LtrRrf {
            match art.ltr {
                None => return Err(FusionError::MissingModel.into()),
                Some(m) if !m.is_valid() => {
                    return Err(PipelineError::Config("ranking model is malformed".into()))
                }
                Some(_) => {}
            }
        }
        Ok(Self {
            index,
            augmenter: cfg.augment.augmenter(),
            toolbox_names: index
                .corpus
                .toolbox
                .iter()
                .map(|t| t.name.clone())
                .collect(),
            cfg,
            art,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    /// Runs every stage for one query.
    pub fn run_query(
        &self,
        q: &LabeledQuery,
        planner: &dyn Planner,
        clock: &dyn Clock,
    ) -> Result<QueryOutcome, PipelineError> {
        let cfg = &self.cfg;
        let ctx = self.index.persona(q)?;
        let mut timings = StageTimings::default();

        let t0 = clock.now_ms();
        let (context_list, context_scores) = match cfg.fusion_for_mode() {
            None => (RankedList::empty(), None),
            Some(fusion) => {
                let text = augment_query(&q.text, ctx.persona, self.augmenter.as_ref());
                let deep = federated_retrieve(
                    q,
                    &text,
                    ctx,
                    &fusion,
                    &self.art,
                    cfg.depth(cfg.k_context),
                )?;
                let judgment =
                    RetrievalJudgment::binary(q.id.as_str(), q.gold_context_ids.iter().cloned());
                let scores = StageScores::compute(&deep, &judgment, &cfg.eval_ks)?;
                (deep.truncated(cfg.k_context), Some(scores))
            }
        };
        let context: Vec<&ContextItem> = context_list.ids().filter_map(|id| ctx.item(id)).collect();
        timings.context_ms = clock.now_ms() - t0;

        let t1 = clock.now_ms();
        let deep_tools = match cfg.tool_mode {
            ToolMode::Semantic => {
                retrieve_tools(q, &context, &self.index.tools, cfg.depth(cfg.k_tools))?
            }
            ToolMode::Oracle => RankedList::from_order(q.gold_tools.iter())?,
            ToolMode::Toolbox => {
                RankedList::from_order(self.index.tools.tools().iter().map(|t| t.name.as_str()))?
            }
        };
        let tool_judgment = RetrievalJudgment::binary(q.id.as_str(), q.gold_tools.iter().cloned());
        let tool_scores = StageScores::compute(&deep_tools, &tool_judgment, &cfg.eval_ks)?;
        let tools = match cfg.tool_mode {
            ToolMode::Semantic => deep_tools.truncated(cfg.k_tools),
            // the bound settings hand the planner the full list
            ToolMode::Oracle | ToolMode::Toolbox => deep_tools,
        };
        timings.tools_ms = clock.now_ms() - t1;

        let t2 = clock.now_ms();
        let req = PlanRequest {
            query: q,
            context: &context,
            tools: &tools,
            toolbox: &self.index.corpus.toolbox,
        };
        let (plan, error) = match planner.plan(&req) {
            Ok(p) => (p, None),
            Err(e) => (Plan::default(), Some(e.0)),
        };
        timings.plan_ms = clock.now_ms() - t2;

        let outcome = ast_match(&plan, &q.gold_plan, &self.toolbox_names);
        Ok(QueryOutcome {
            record: QueryRecord {
                query_id: q.id.clone(),
                context: context_scores,
                tools: Some(tool_scores),
                plan: Some(outcome),
            },
            trace: PipelineTrace {
                query_id: q.id.clone(),
                retrieved_context: context_list,
                retrieved_tools: tools,
                plan,
                timings,
                error,
            },
        })
    }
}

/// Traces in query order plus the aggregated report.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub traces: Vec<PipelineTrace>,
    pub records: Vec<QueryRecord>,
    pub report: EvalReport,
}

/// Collects per-query outcomes into a run; `outcomes` must be in query order.
pub fn collect_run(outcomes: Vec<QueryOutcome>) -> Result<PipelineRun, PipelineError> {
    let (traces, records): (Vec<_>, Vec<_>) =
        outcomes.into_iter().map(|o| (o.trace, o.record)).unzip();
    let report = aggregate(&records)?;
    Ok(PipelineRun {
        traces,
        records,
        report,
    })
}

/// Runs every query of `split` sequentially.
pub fn run_pipeline(
    index: &CorpusIndex<'_>,
    split: Split,
    cfg: &PipelineConfig,
    art: &Artifacts<'_>,
    planner: &dyn Planner,
    clock: &dyn Clock,
) -> Result<PipelineRun, PipelineError> {
    let pipe = Pipeline::new(index, cfg.clone(), art.clone())?;
    let outcomes = index
        .corpus
        .queries_in(split)
        .map(|q| pipe.run_query(q, planner, clock))
        .collect::<Result<Vec<_>, _>>()?;
    collect_run(outcomes)
}

/// Share of plans whose api is outside the toolbox.
pub fn hallucination_fraction(records: &[QueryRecord]) -> f64 {
    let n = records.len().max(1);
    records
        .iter()
        .filter(|r| r.plan.is_some_and(|p: AstOutcome| p.hallucinated))
        .count() as f64
        / n as f64
}
