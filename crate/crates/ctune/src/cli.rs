//! The `ctune` command line: argument definitions, configuration layering
//! and the four subcommands.
//!
//! Each subcommand's options double as a section of the TOML config file, so
//! layering is a field-wise merge: flags, then the file, then defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand};
use ctune_core::corpus::{generate_corpus, validate_corpus_window, Corpus, CorpusConfig, Split};
use ctune_core::fusion::{Artifacts, EmbeddingConfig, FusionError, FusionMode};
use ctune_core::ltr::{default_schema, train, TrainConfig, TrainError};
use ctune_core::metrics::REPORT_KS;
use ctune_core::pipeline::{
    ltr_groups, AugmentKind, ContextMode, CorpusIndex, MockPlanner, PipelineConfig, PipelineError,
    Planner, PlannerKind, ToolMode,
};
use ctune_core::{Embedding, LtrModel};
use serde::{Deserialize, Serialize};

use crate::dataset::{self, DatasetError};
use crate::embeddings::{load_embeddings, EmbeddingsError};
use crate::manifest::OutputDir;
use crate::model_io::{self, ModelIoError};
use crate::planner_http::{HttpPlanner, HttpPlannerConfig};
use crate::report::{self, ReportError, ReportRow, Stage};
use crate::runner::{self, WallClock};

pub const MODEL_FILE: &str = "model.txt";
pub const TRAIN_LOG_FILE: &str = "train_log.csv";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_TXT: &str = "report.txt";
pub const TIMINGS_FILE: &str = "timings.csv";

/// A failed command. Usage errors exit with 2, everything else with 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::MissingDir(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(_) | PipelineError::Fusion(FusionError::MissingModel) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::BadConfig(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

macro_rules! runtime_from {
    ($($t:ty),+) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Runtime(e.to_string())
            }
        })+
    };
}

runtime_from!(std::io::Error, ModelIoError, ReportError, EmbeddingsError);

#[derive(Debug, Parser)]
#[command(
    name = "ctune",
    version,
    about = "Context-tuned retrieval for tool planning"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonOpts {
    /// Dataset directory.
    #[arg(long, global = true)]
    pub dataset: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML file with defaults for any option.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for evaluation; 0 uses every CPU.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate, validate and save a synthetic dataset.
    GenData(GenDataOpts),
    /// Train the context ranker on the train split.
    TrainLtr(TrainOpts),
    /// Evaluate one stage for several modes side by side.
    Eval(EvalOpts),
    /// Merge report CSVs from earlier runs.
    Report(ReportOpts),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenDataOpts {
    #[arg(long)]
    pub n_personas: Option<usize>,
    /// End of the item window, RFC 3339.
    #[arg(long)]
    pub epoch_start: Option<DateTime<Utc>>,
    #[arg(long)]
    pub window_days: Option<u32>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainOpts {
    #[arg(long)]
    pub n_trees: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub max_leaves: Option<usize>,
    #[arg(long)]
    pub min_samples_leaf: Option<usize>,
    #[arg(long)]
    pub ndcg_cutoff: Option<usize>,
    #[arg(long)]
    pub subsample: Option<f64>,
    #[arg(long)]
    pub augment: Option<AugmentKind>,
    /// Precomputed vectors keyed by item or query id.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub dims: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalOpts {
    /// context, tools or e2e.
    #[arg(long)]
    pub stage: Option<Stage>,
    /// Context modes (none, bm25, semantic, ltr-rrf, oracle) or presets
    /// (lower-bound, rag, context-tuned, oracle-context, upper-bound).
    #[arg(long, value_delimiter = ',')]
    pub modes: Option<Vec<String>>,
    /// Cutoffs, e.g. `3,5,10` or `1..10`.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub split: Option<Split>,
    /// Ranker file from train-ltr; needed by ltr-rrf.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub fusion_mode: Option<FusionMode>,
    #[arg(long)]
    pub rrf_k: Option<f64>,
    #[arg(long)]
    pub tool_mode: Option<ToolMode>,
    #[arg(long)]
    pub augment: Option<AugmentKind>,
    #[arg(long)]
    pub k_context: Option<usize>,
    #[arg(long)]
    pub k_tools: Option<usize>,
    #[arg(long)]
    pub planner: Option<PlannerKind>,
    #[arg(long)]
    pub planner_url: Option<String>,
    #[arg(long)]
    pub planner_timeout_ms: Option<u64>,
    /// Maximum concurrent planner requests.
    #[arg(long)]
    pub planner_concurrency: Option<usize>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub dims: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ReportOpts {
    /// Report CSVs, or eval output directories containing one.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

/// The TOML config file: common keys at the top, one table per command.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub dataset: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub gen_data: GenDataOpts,
    pub train: TrainOpts,
    pub eval: EvalOpts,
}

/// Fills every `None` field of `$flags` from `$file`.
macro_rules! layer {
    ($flags:expr, $file:expr, [$($f:ident),+ $(,)?]) => {
        $(if $flags.$f.is_none() {
            $flags.$f = $file.$f.clone();
        })+
    };
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
    }
}

/// Parses `3,5,10`, `1..10` (inclusive) or a mix.
pub fn parse_ks(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || usage(format!("invalid cutoff list `{s}`"));
    let mut ks = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                ks.extend(a..=b);
            }
            None => ks.push(part.parse().map_err(|_| bad())?),
        }
    }
    if ks.is_empty() || ks.contains(&0) {
        return Err(bad());
    }
    ks.sort_unstable();
    ks.dedup();
    Ok(ks)
}

/// Parses and runs a command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.common.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let mut common = cli.common;
    layer!(common, file, [dataset, out, seed, threads]);
    match cli.command {
        Command::GenData(mut o) => {
            layer!(o, file.gen_data, [n_personas, epoch_start, window_days]);
            gen_data(&common, &o)
        }
        Command::TrainLtr(mut o) => {
            layer!(
                o,
                file.train,
                [
                    n_trees,
                    learning_rate,
                    sigma,
                    max_leaves,
                    min_samples_leaf,
                    ndcg_cutoff,
                    subsample,
                    augment,
                    embeddings,
                    dims
                ]
            );
            train_ltr(&common, &o)
        }
        Command::Eval(mut o) => {
            layer!(
                o,
                file.eval,
                [
                    stage,
                    modes,
                    k,
                    split,
                    model,
                    fusion_mode,
                    rrf_k,
                    tool_mode,
                    augment,
                    k_context,
                    k_tools,
                    planner,
                    planner_url,
                    planner_timeout_ms,
                    planner_concurrency,
                    embeddings,
                    dims
                ]
            );
            eval(&common, &o)
        }
        Command::Report(o) => report_cmd(&common, &o),
    }
}

fn require<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
    p.as_deref()
        .ok_or_else(|| usage(format!("missing --{flag}")))
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("configs serialize")
}

#[derive(Debug, Serialize)]
struct GenDataConfig {
    out: PathBuf,
    seed: u64,
    n_personas: usize,
    epoch_start: DateTime<Utc>,
    window_days: u32,
}

fn gen_data(common: &CommonOpts, o: &GenDataOpts) -> Result<(), CliError> {
    let out = common
        .out
        .as_deref()
        .or(common.dataset.as_deref())
        .ok_or_else(|| usage("missing --out"))?;
    let d = CorpusConfig::default();
    let cfg = CorpusConfig {
        seed: common.seed.unwrap_or(d.seed),
        n_personas: o.n_personas.unwrap_or(d.n_personas),
        epoch_start: o.epoch_start.unwrap_or(d.epoch_start),
        window_days: o.window_days.unwrap_or(d.window_days),
    };
    let corpus = generate_corpus(&cfg).map_err(|e| usage(e.to_string()))?;
    let violations = validate_corpus_window(&corpus, cfg.window_start(), cfg.epoch_start);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        return Err(CliError::Runtime(format!(
            "generated corpus has {} invariant violations",
            violations.len()
        )));
    }

    let mut dir = OutputDir::create(out)?;
    let files = dataset::encode_corpus(&corpus);
    for (name, bytes) in &files {
        dir.write(name, bytes)?;
    }
    let hash = dataset::corpus_hash_of(&files);
    let snapshot = GenDataConfig {
        out: out.to_path_buf(),
        seed: cfg.seed,
        n_personas: cfg.n_personas,
        epoch_start: cfg.epoch_start,
        window_days: cfg.window_days,
    };
    dir.finish("gen-data", to_json(&snapshot), &hash)?;
    println!(
        "wrote {} personas, {} items, {} tools, {} queries ({} train / {} test) to {}",
        corpus.personas.len(),
        corpus.item_count(),
        corpus.toolbox.len(),
        corpus.queries.len(),
        corpus.queries_in(Split::Train).count(),
        corpus.queries_in(Split::Test).count(),
        out.display()
    );
    Ok(())
}

fn load_dataset(common: &CommonOpts) -> Result<(Corpus, String), CliError> {
    let dir = require(&common.dataset, "dataset")?;
    let corpus = dataset::load_corpus(dir)?;
    let violations = ctune_core::corpus::validate_corpus(&corpus);
    if let Some(v) = violations.first() {
        return Err(CliError::Runtime(format!(
            "dataset has {} invariant violations, first: {v}",
            violations.len()
        )));
    }
    let hash = dataset::corpus_hash(&corpus);
    Ok((corpus, hash))
}

fn load_vectors(
    path: &Option<PathBuf>,
    dims: usize,
) -> Result<Option<BTreeMap<String, Embedding>>, CliError> {
    let Some(path) = path else { return Ok(None) };
    let v = load_embeddings(path)?;
    if let Some(got) = v.values().next().map(Embedding::dims) {
        if got != dims {
            return Err(usage(format!(
                "{} has {got}-dimensional vectors but --dims is {dims}",
                path.display()
            )));
        }
    }
    Ok(Some(v))
}

fn embedding_config(dims: usize, pre: Option<&BTreeMap<String, Embedding>>) -> EmbeddingConfig<'_> {
    EmbeddingConfig {
        dims,
        precomputed: pre,
        ..EmbeddingConfig::default()
    }
}

#[derive(Debug, Serialize)]
struct TrainRunConfig {
    dataset: PathBuf,
    out: PathBuf,
    train: TrainConfig,
    augment: AugmentKind,
    dims: usize,
    embeddings: Option<PathBuf>,
}

fn train_ltr(common: &CommonOpts, o: &TrainOpts) -> Result<(), CliError> {
    let out = require(&common.out, "out")?;
    let (corpus, hash) = load_dataset(common)?;
    let d = TrainConfig::default();
    let cfg = TrainConfig {
        n_trees: o.n_trees.unwrap_or(d.n_trees),
        learning_rate: o.learning_rate.unwrap_or(d.learning_rate),
        sigma: o.sigma.unwrap_or(d.sigma),
        max_leaves: o.max_leaves.unwrap_or(d.max_leaves),
        min_samples_leaf: o.min_samples_leaf.or(d.min_samples_leaf),
        ndcg_cutoff: o.ndcg_cutoff.unwrap_or(d.ndcg_cutoff),
        base_score: d.base_score,
        subsample: o.subsample.unwrap_or(d.subsample),
        seed: common.seed.unwrap_or(d.seed),
    };
    cfg.validate()?;
    let dims = o.dims.unwrap_or(EmbeddingConfig::default().dims);
    let augment = o.augment.unwrap_or(AugmentKind::None);
    let vectors = load_vectors(&o.embeddings, dims)?;
    let index = CorpusIndex::build(&corpus, &embedding_config(dims, vectors.as_ref()))?;
    let groups = ltr_groups(&index, Split::Train, augment, &Artifacts::default())?;
    let outcome = train(&groups, &cfg)?;

    let mut dir = OutputDir::create(out)?;
    dir.write(
        MODEL_FILE,
        model_io::format_model(&outcome.model).as_bytes(),
    )?;
    dir.write(
        TRAIN_LOG_FILE,
        &model_io::format_training_log(&outcome.log)?,
    )?;
    let snapshot = TrainRunConfig {
        dataset: require(&common.dataset, "dataset")?.to_path_buf(),
        out: out.to_path_buf(),
        train: cfg,
        augment,
        dims,
        embeddings: o.embeddings.clone(),
    };
    dir.finish("train-ltr", to_json(&snapshot), &hash)?;
    println!(
        "trained {} trees on {} groups; mean train NDCG@{} {:.4}",
        outcome.model.trees.len(),
        groups.len(),
        snapshot.train.ndcg_cutoff,
        outcome.final_ndcg
    );
    Ok(())
}

const PRESETS: [&str; 5] = [
    "lower-bound",
    "rag",
    "context-tuned",
    "oracle-context",
    "upper-bound",
];

/// Resolves an eval mode name to a configuration. Presets fix the context
/// and tool modes; a plain context mode takes the tool mode from `base`.
pub fn mode_config(name: &str, base: &PipelineConfig) -> Result<PipelineConfig, CliError> {
    if PRESETS.contains(&name) {
        let p = PipelineConfig::preset(name)?;
        return Ok(PipelineConfig {
            context_mode: p.context_mode,
            tool_mode: p.tool_mode,
            ..base.clone()
        });
    }
    let context_mode: ContextMode = name.parse().map_err(|_| {
        usage(format!(
            "unknown mode `{name}`; expected one of none, bm25, semantic, ltr-rrf, oracle, {}",
            PRESETS.join(", ")
        ))
    })?;
    Ok(PipelineConfig {
        context_mode,
        ..base.clone()
    })
}

fn default_modes(stage: Stage) -> Vec<String> {
    let m: &[&str] = match stage {
        Stage::Context => &["bm25", "semantic", "ltr-rrf"],
        Stage::Tools => &["none", "oracle"],
        Stage::E2e => &["none", "semantic", "ltr-rrf", "oracle"],
    };
    m.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Serialize)]
struct EvalRunConfig {
    dataset: PathBuf,
    out: PathBuf,
    stage: &'static str,
    split: Split,
    modes: Vec<(String, PipelineConfig)>,
    model: Option<PathBuf>,
    model_sha256: Option<String>,
    planner: Option<HttpPlannerConfig>,
    dims: usize,
    embeddings: Option<PathBuf>,
    threads: usize,
}

fn eval(common: &CommonOpts, o: &EvalOpts) -> Result<(), CliError> {
    let stage = o.stage.ok_or_else(|| usage("missing --stage"))?;
    let out = require(&common.out, "out")?;
    let dataset_dir = require(&common.dataset, "dataset")?;
    if !dataset_dir.is_dir() {
        return Err(DatasetError::MissingDir(dataset_dir.to_path_buf()).into());
    }

    let d = PipelineConfig::default();
    let base = PipelineConfig {
        context_mode: d.context_mode,
        k_context: o.k_context.unwrap_or(d.k_context),
        k_tools: o.k_tools.unwrap_or(d.k_tools),
        tool_mode: o.tool_mode.unwrap_or(d.tool_mode),
        planner: o.planner.unwrap_or(d.planner),
        augment: o.augment.unwrap_or(d.augment),
        fusion: ctune_core::FusionConfig {
            mode: o.fusion_mode.unwrap_or(d.fusion.mode),
            rrf_k: o.rrf_k.unwrap_or(d.fusion.rrf_k),
            ..d.fusion
        },
        eval_ks: match &o.k {
            Some(s) => parse_ks(s)?,
            None => REPORT_KS.to_vec(),
        },
    };
    let names = o.modes.clone().unwrap_or_else(|| default_modes(stage));
    if names.is_empty() {
        return Err(usage("--modes is empty"));
    }
    let mut modes = Vec::new();
    for name in &names {
        let cfg = mode_config(name, &base)?;
        cfg.validate()?;
        if stage == Stage::Context && cfg.context_mode == ContextMode::None {
            return Err(usage(format!(
                "mode `{name}` retrieves no context to evaluate"
            )));
        }
        modes.push((name.clone(), cfg));
    }

    let planner_cfg = match base.planner {
        PlannerKind::Mock => None,
        PlannerKind::External => Some(HttpPlannerConfig {
            url: o
                .planner_url
                .clone()
                .ok_or_else(|| usage("--planner external needs --planner-url"))?,
            timeout_ms: o.planner_timeout_ms.unwrap_or(30_000),
            max_in_flight: o.planner_concurrency.unwrap_or(4),
        }),
    };
    let needs_model = modes
        .iter()
        .any(|(_, c)| c.context_mode == ContextMode::LtrRrf);
    let model: Option<LtrModel> = match (&o.model, needs_model) {
        (Some(p), _) => Some(model_io::load_model(p, &default_schema())?),
        (None, true) => return Err(usage("ltr-rrf needs --model (train one with train-ltr)")),
        (None, false) => None,
    };
    let model_sha256 = match &o.model {
        Some(p) => Some(dataset::sha256_hex(&fs::read(p)?)),
        None => None,
    };

    let (corpus, hash) = load_dataset(common)?;
    let dims = o.dims.unwrap_or(EmbeddingConfig::default().dims);
    let vectors = load_vectors(&o.embeddings, dims)?;
    let index = CorpusIndex::build(&corpus, &embedding_config(dims, vectors.as_ref()))?;
    let art = Artifacts {
        ltr: model.as_ref(),
        ..Artifacts::default()
    };
    let split = o.split.unwrap_or(Split::Test);
    let threads = common.threads.unwrap_or(0);
    let http = planner_cfg.as_ref().map(HttpPlanner::new);
    let planner: &(dyn Planner + Sync) = match &http {
        Some(h) => h,
        None => &MockPlanner,
    };
    let clock = WallClock::new();

    let mut dir = OutputDir::create(out)?;
    let mut rows: Vec<ReportRow> = Vec::new();
    let mut runs = Vec::new();
    for (name, cfg) in &modes {
        let run = runner::run_parallel(&index, split, cfg, &art, planner, &clock, threads)?;
        rows.extend(report::rows_for(&hash, stage, name, &run.report)?);
        dir.write(
            &format!("traces-{name}.jsonl"),
            &runner::traces_jsonl(&run.traces),
        )?;
        let failed = run.traces.iter().filter(|t| t.error.is_some()).count();
        if failed > 0 {
            eprintln!("{name}: planner failed on {failed} queries (scored as incorrect)");
        }
        runs.push((name.as_str(), run.traces));
    }
    let table = report::format_table(&rows);
    dir.write(REPORT_CSV, &report::write_csv(&rows))?;
    dir.write(REPORT_TXT, table.as_bytes())?;
    dir.write_unhashed(
        TIMINGS_FILE,
        &runner::timings_csv(runs.iter().map(|(n, t)| (*n, t.as_slice()))),
    )?;
    let snapshot = EvalRunConfig {
        dataset: dataset_dir.to_path_buf(),
        out: out.to_path_buf(),
        stage: stage.as_str(),
        split,
        modes,
        model: o.model.clone(),
        model_sha256,
        planner: planner_cfg,
        dims,
        embeddings: o.embeddings.clone(),
        threads,
    };
    dir.finish("eval", to_json(&snapshot), &hash)?;
    print!("{table}");
    Ok(())
}

#[derive(Debug, Serialize)]
struct ReportRunConfig {
    out: PathBuf,
    inputs: Vec<PathBuf>,
}

fn report_cmd(common: &CommonOpts, o: &ReportOpts) -> Result<(), CliError> {
    let mut inputs = Vec::new();
    for p in &o.inputs {
        let path = if p.is_dir() {
            p.join(REPORT_CSV)
        } else {
            p.clone()
        };
        if !path.is_file() {
            return Err(usage(format!("no report at {}", path.display())));
        }
        let rows = report::read_csv(&path)?;
        inputs.push((path, rows));
    }
    let merged = report::merge(&inputs)?;
    let hash = merged[0].corpus_hash.clone();
    let table = report::format_table(&merged);
    print!("{table}");
    // Without --out the merged table is only printed.
    let Some(out) = common.out.as_deref() else {
        return Ok(());
    };
    let mut dir = OutputDir::create(out)?;
    dir.write(REPORT_CSV, &report::write_csv(&merged))?;
    dir.write(REPORT_TXT, table.as_bytes())?;
    let snapshot = ReportRunConfig {
        out: out.to_path_buf(),
        inputs: inputs.into_iter().map(|(p, _)| p).collect(),
    };
    dir.finish("report", to_json(&snapshot), &hash)?;
    Ok(())
}
