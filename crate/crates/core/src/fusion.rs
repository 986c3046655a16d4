//! Reciprocal rank fusion and federated retrieval over a persona's
//! per-application context stores.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{App, ContextItem, ContextStore, LabeledQuery, Persona};
use crate::ltr::{item_features, FeatureVector, LtrModel, QuerySignals, TrainError};
use crate::retrieval::{
    bm25_topk, cosine_topk, Bm25Params, Embedding, HashedEmbedder, InvertedIndex, RankedList,
    RetrievalError,
};

/// Default RRF constant.
pub const DEFAULT_RRF_K: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FusionError {
    #[error("rrf_k must be a positive finite number, got {0}")]
    BadRrfK(f64),
    #[error("backend `ltr` needs a trained model")]
    MissingModel,
    #[error("store of persona `{store}` passed for persona `{persona}`")]
    ForeignStore { persona: String, store: String },
    #[error("unknown {kind} `{value}`")]
    UnknownName { kind: &'static str, value: String },
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Model(#[from] TrainError),
}

/// How per-list results are merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FusionMode {
    /// Rank inside every store with one backend, then fuse the store lists.
    FuseStores,
    /// Pool all stores, rank the pool with each ranker, then fuse the rankers.
    FuseRankers,
}

/// Ranking function applied to context items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FusionBackend {
    Bm25,
    Semantic,
    Ltr,
    /// Returns the gold context in label order.
    Oracle,
}

macro_rules! named_enum {
    ($ty:ty, $kind:literal, [$(($v:path, $s:literal)),+ $(,)?]) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($v => $s),+ }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
        impl FromStr for $ty {
            type Err = FusionError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($s => Ok($v),)+
                    _ => Err(FusionError::UnknownName { kind: $kind, value: s.to_string() }),
                }
            }
        }
    };
}

named_enum!(
    FusionMode,
    "fusion mode",
    [
        (FusionMode::FuseStores, "fuse-stores"),
        (FusionMode::FuseRankers, "fuse-rankers"),
    ]
);
named_enum!(
    FusionBackend,
    "fusion backend",
    [
        (FusionBackend::Bm25, "bm25"),
        (FusionBackend::Semantic, "semantic"),
        (FusionBackend::Ltr, "ltr"),
        (FusionBackend::Oracle, "oracle"),
    ]
);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig {
    pub rrf_k: f64,
    pub mode: FusionMode,
    pub backend: FusionBackend,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            rrf_k: DEFAULT_RRF_K,
            mode: FusionMode::FuseStores,
            backend: FusionBackend::Bm25,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<(), FusionError> {
        if self.rrf_k.is_finite() && self.rrf_k > 0.0 {
            Ok(())
        } else {
            Err(FusionError::BadRrfK(self.rrf_k))
        }
    }
}

/// Reciprocal rank fusion: `score(d) = sum over lists of 1 / (rrf_k + rank)`
/// with 1-based ranks; lists that miss `d` add nothing.
///
/// Each item's terms are added in ascending rank order, so the result does
/// not depend on the order of `lists`, not even in the last bit.
pub fn rrf_fuse(lists: &[RankedList], rrf_k: f64, k: usize) -> Result<RankedList, FusionError> {
    if !(rrf_k.is_finite() && rrf_k > 0.0) {
        return Err(FusionError::BadRrfK(rrf_k));
    }
    let mut ranks: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for list in lists {
        for (i, e) in list.entries().iter().enumerate() {
            ranks.entry(e.id.as_str()).or_default().push(i + 1);
        }
    }
    let scored = ranks.into_iter().map(|(id, mut rs)| {
        rs.sort_unstable();
        let s: f64 = rs.iter().map(|&r| 1.0 / (rrf_k + r as f64)).sum();
        (id.to_string(), s)
    });
    Ok(RankedList::from_scores(scored, k)?)
}

/// Produces a suffix that is appended to a query before retrieval.
pub trait QueryAugmenter {
    fn suffix(&self, text: &str, persona: &Persona) -> String;
}

/// Leaves queries unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityAugmenter;

impl QueryAugmenter for IdentityAugmenter {
    fn suffix(&self, _text: &str, _persona: &Persona) -> String {
        String::new()
    }
}

/// Appends the persona's two most used apps as hint terms:
/// `" [hint: calendar reminders]"`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HabitHintAugmenter;

impl QueryAugmenter for HabitHintAugmenter {
    fn suffix(&self, _text: &str, persona: &Persona) -> String {
        let apps = persona.apps_by_usage();
        let names: Vec<&str> = apps.iter().take(2).map(|a| a.as_str()).collect();
        format!(" [hint: {}]", names.join(" "))
    }
}

pub fn augment_query(text: &str, persona: &Persona, augmenter: &dyn QueryAugmenter) -> String {
    let mut out = String::from(text);
    out.push_str(&augmenter.suffix(text, persona));
    out
}

/// How context items and queries are embedded for semantic search.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingConfig<'a> {
    pub dims: usize,
    /// Add character trigrams to the hashed vocabulary.
    pub subwords: bool,
    /// Externally computed vectors keyed by item or query id; ids missing
    /// from the map fall back to the hashed embedding.
    pub precomputed: Option<&'a BTreeMap<String, Embedding>>,
}

impl Default for EmbeddingConfig<'_> {
    fn default() -> Self {
        Self {
            dims: 1024,
            subwords: true,
            precomputed: None,
        }
    }
}

/// A persona's stores prepared for retrieval: one BM25 index per store, a
/// pooled index, and an embedding per item. The hashed embedder takes its
/// idf from the pooled items.
pub struct PersonaContext<'c> {
    pub persona: &'c Persona,
    items: Vec<&'c ContextItem>,
    stores: Vec<(App, Range<usize>, InvertedIndex)>,
    pooled: InvertedIndex,
    embedder: HashedEmbedder,
    embeddings: Vec<Embedding>,
    precomputed: Option<&'c BTreeMap<String, Embedding>>,
}

impl<'c> PersonaContext<'c> {
    pub fn build(
        persona: &'c Persona,
        stores: &[&'c ContextStore],
        emb: &EmbeddingConfig<'c>,
    ) -> Result<Self, FusionError> {
        let mut items = Vec::new();
        let mut ranges = Vec::new();
        for s in stores {
            if s.persona_id != persona.id {
                return Err(FusionError::ForeignStore {
                    persona: persona.id.clone(),
                    store: s.persona_id.clone(),
                });
            }
            let start = items.len();
            items.extend(s.items.iter());
            ranges.push((s.app, start..items.len()));
        }
        let texts: Vec<(String, String)> = items.iter().map(|i| (i.id.clone(), i.text())).collect();
        let mut store_indexes = Vec::with_capacity(ranges.len());
        for (app, range) in ranges {
            let idx = InvertedIndex::build(texts[range.clone()].iter().cloned())?;
            store_indexes.push((app, range, idx));
        }
        let pooled = InvertedIndex::build(texts.iter().cloned())?;
        let embedder = if emb.subwords {
            HashedEmbedder::subwords(texts.iter().cloned(), emb.dims)?
        } else {
            HashedEmbedder::words(texts.iter().cloned(), emb.dims)?
        };
        let embeddings = items
            .iter()
            .zip(&texts)
            .map(
                |(item, (_, text))| match emb.precomputed.and_then(|m| m.get(&item.id)) {
                    Some(v) => v.clone(),
                    None => embedder.embed_text(text),
                },
            )
            .collect();
        Ok(Self {
            persona,
            items,
            stores: store_indexes,
            pooled,
            embedder,
            embeddings,
            precomputed: emb.precomputed,
        })
    }

    pub fn items(&self) -> &[&'c ContextItem] {
        &self.items
    }

    pub fn pooled_index(&self) -> &InvertedIndex {
        &self.pooled
    }

    pub fn item(&self, id: &str) -> Option<&'c ContextItem> {
        self.items.iter().copied().find(|i| i.id == id)
    }

    /// Query-side signals for `text`; a precomputed vector for `query_id`
    /// takes precedence over the hashed embedding.
    pub fn signals(&self, query_id: &str, text: &str, query: &LabeledQuery) -> QuerySignals {
        let embedding = match self.precomputed.and_then(|m| m.get(query_id)) {
            Some(v) => v.clone(),
            None => self.embedder.embed_text(text),
        };
        QuerySignals::new(text, embedding, query.timestamp)
    }

    /// Features of every pooled item, in pool order.
    pub fn features(&self, q: &QuerySignals, bm25: &Bm25Params) -> Vec<FeatureVector> {
        self.items
            .iter()
            .zip(&self.embeddings)
            .map(|(item, emb)| item_features(q, item, emb, self.persona, &self.pooled, bm25))
            .collect()
    }

    fn rank_range(
        &self,
        backend: FusionBackend,
        range: Range<usize>,
        index: &InvertedIndex,
        q: &QuerySignals,
        art: &Artifacts<'_>,
        feats: &mut Option<Vec<FeatureVector>>,
    ) -> Result<RankedList, FusionError> {
        let n = range.len();
        match backend {
            FusionBackend::Bm25 => Ok(bm25_topk(index, &q.terms, &art.bm25, n)),
            FusionBackend::Semantic => Ok(cosine_topk(
                &q.embedding,
                range
                    .clone()
                    .map(|i| (self.items[i].id.as_str(), &self.embeddings[i])),
                n,
            )?),
            FusionBackend::Ltr => {
                let model = art.ltr.ok_or(FusionError::MissingModel)?;
                let all = feats.get_or_insert_with(|| self.features(q, &art.bm25));
                let cands: Vec<(&str, FeatureVector)> = range
                    .map(|i| (self.items[i].id.as_str(), all[i].clone()))
                    .collect();
                Ok(model.rank(&cands, n)?)
            }
            FusionBackend::Oracle => unreachable!("oracle is handled before ranking"),
        }
    }
}

/// Models and parameters the backends need.
#[derive(Clone, Default)]
pub struct Artifacts<'a> {
    pub bm25: Bm25Params,
    pub ltr: Option<&'a LtrModel>,
}

/// Rankers fused in `fuse-rankers` mode for a backend.
pub fn rankers_for(backend: FusionBackend) -> &'static [FusionBackend] {
    match backend {
        FusionBackend::Bm25 => &[FusionBackend::Bm25],
        FusionBackend::Semantic => &[FusionBackend::Semantic],
        FusionBackend::Ltr => &[
            FusionBackend::Bm25,
            FusionBackend::Semantic,
            FusionBackend::Ltr,
        ],
        FusionBackend::Oracle => &[FusionBackend::Oracle],
    }
}

/// Retrieves the top `k` context items of the query's persona.
///
/// `fuse-stores` ranks each store with the backend and fuses the store
/// lists with RRF. `fuse-rankers` ranks the pooled items once per ranker
/// of [`rankers_for`] and fuses those lists. The oracle backend returns the
/// gold context ids at ranks 1..n. `text` is the (possibly augmented)
/// query text.
pub fn federated_retrieve(
    query: &LabeledQuery,
    text: &str,
    ctx: &PersonaContext<'_>,
    cfg: &FusionConfig,
    art: &Artifacts<'_>,
    k: usize,
) -> Result<RankedList, FusionError> {
    cfg.validate()?;
    if cfg.backend == FusionBackend::Oracle {
        let mut seen = alloc::collections::BTreeSet::new();
        let ids = query
            .gold_context_ids
            .iter()
            .filter(|g| seen.insert(g.as_str()));
        return Ok(RankedList::from_order(ids)?.truncated(k));
    }
    if cfg.backend == FusionBackend::Ltr && art.ltr.is_none() {
        return Err(FusionError::MissingModel);
    }
    let q = ctx.signals(&query.id, text, query);
    let mut feats = None;
    let lists = match cfg.mode {
        FusionMode::FuseStores => ctx
            .stores
            .iter()
            .map(|(_, range, index)| {
                ctx.rank_range(cfg.backend, range.clone(), index, &q, art, &mut feats)
            })
            .collect::<Result<Vec<_>, _>>()?,
        FusionMode::FuseRankers => rankers_for(cfg.backend)
            .iter()
            .map(|&b| ctx.rank_range(b, 0..ctx.items.len(), &ctx.pooled, &q, art, &mut feats))
            .collect::<Result<Vec<_>, _>>()?,
    };
    rrf_fuse(&lists, cfg.rrf_k, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Plan, Split};
    use alloc::vec;
    use chrono::{TimeZone, Utc};

    fn l(ids: &[&str]) -> RankedList {
        RankedList::from_order(ids.iter().copied()).unwrap()
    }

    #[test]
    fn rrf_worked_example() {
        let fused = rrf_fuse(&[l(&["x", "y", "z"]), l(&["y", "z", "x"])], 60.0, 10).unwrap();
        assert_eq!(fused.ids().collect::<Vec<_>>(), ["y", "x", "z"]);
        let s: Vec<f64> = fused.entries().iter().map(|e| e.score).collect();
        // hand summation: y = 1/62 + 1/61, x = 1/61 + 1/63, z = 1/63 + 1/62
        for (got, want) in s
            .iter()
            .zip([0.032_522_474_9, 0.032_266_458_5, 0.032_002_048_1])
        {
            assert!((got - want).abs() < 1e-9, "{got}");
        }
    }

    #[test]
    fn rrf_basics() {
        let two = rrf_fuse(&[l(&["a"]), l(&["a"])], 60.0, 5).unwrap();
        assert!((two.entries()[0].score - 2.0 / 61.0).abs() < 1e-15);
        let single = rrf_fuse(&[l(&["c", "a", "b"])], 60.0, 5).unwrap();
        assert_eq!(single.ids().collect::<Vec<_>>(), ["c", "a", "b"]);
        assert_eq!(single.entries()[2].score, 1.0 / 63.0);
        assert!(rrf_fuse(&[], 60.0, 3).unwrap().is_empty());
        assert_eq!(
            rrf_fuse(&[l(&["a"])], 0.0, 3),
            Err(FusionError::BadRrfK(0.0))
        );
        assert_eq!(rrf_fuse(&[l(&["a", "b", "c"])], 60.0, 2).unwrap().len(), 2);
    }

    #[test]
    fn names_round_trip() {
        for m in [FusionMode::FuseStores, FusionMode::FuseRankers] {
            assert_eq!(m.as_str().parse::<FusionMode>().unwrap(), m);
        }
        for b in [
            FusionBackend::Bm25,
            FusionBackend::Semantic,
            FusionBackend::Ltr,
            FusionBackend::Oracle,
        ] {
            assert_eq!(b.to_string().parse::<FusionBackend>().unwrap(), b);
        }
        assert!("fuse-all".parse::<FusionMode>().is_err());
    }

    fn persona(top: [App; 2]) -> Persona {
        let mut usage: BTreeMap<App, f64> = App::ALL.iter().map(|&a| (a, 0.02)).collect();
        usage.insert(top[0], 0.5);
        usage.insert(top[1], 0.4);
        Persona {
            id: "p1".into(),
            attributes: BTreeMap::new(),
            app_usage_profile: usage,
        }
    }

    #[test]
    fn augmenters() {
        let p = persona([App::Calendar, App::Reminders]);
        assert_eq!(augment_query("hi", &p, &IdentityAugmenter), "hi");
        assert_eq!(
            augment_query("I'm running late.", &p, &HabitHintAugmenter),
            "I'm running late. [hint: calendar reminders]"
        );
    }

    #[test]
    fn hint_never_lowers_similarity_to_hinted_apps() {
        let p = persona([App::Calendar, App::Reminders]);
        let docs = [
            ("c1", "calendar standup meeting"),
            ("c2", "calendar dentist"),
            ("r1", "reminders pay rent"),
            ("n1", "notes diet plan"),
            ("m1", "music summer dreams"),
        ];
        let emb = HashedEmbedder::words(docs, 256).unwrap();
        // implicit queries, the case the hint is meant for
        for text in ["I'm running late", "what now", "pay it"] {
            let plain = emb.embed_text(text);
            let hinted = emb.embed_text(&augment_query(text, &p, &HabitHintAugmenter));
            for (id, doc) in &docs[..3] {
                let d = emb.embed_text(doc);
                assert!(hinted.dot(&d) >= plain.dot(&d) - 1e-12, "{text} / {id}");
            }
        }
    }

    fn item(id: &str, app: App, title: &str) -> ContextItem {
        ContextItem {
            id: id.into(),
            app,
            title: title.into(),
            body: String::new(),
            timestamp: Utc.with_ymd_and_hms(2023, 12, 1, 10, 0, 0).unwrap(),
            categorical_tags: BTreeMap::new(),
            access_count: 1,
        }
    }

    fn store(app: App, items: &[(&str, &str)]) -> ContextStore {
        ContextStore {
            persona_id: "p1".into(),
            app,
            items: items.iter().map(|(id, t)| item(id, app, t)).collect(),
        }
    }

    fn query(text: &str) -> LabeledQuery {
        LabeledQuery {
            id: "q1".into(),
            persona_id: "p1".into(),
            text: text.into(),
            timestamp: Utc.with_ymd_and_hms(2023, 12, 8, 10, 0, 0).unwrap(),
            gold_context_ids: vec!["c2".into(), "r1".into()],
            gold_tools: vec!["get_event_details".into()],
            gold_plan: Plan::new("get_event_details"),
            split: Split::Test,
        }
    }

    fn two_stores() -> (ContextStore, ContextStore) {
        (
            store(
                App::Calendar,
                &[
                    ("c1", "sprint planning meeting"),
                    ("c2", "guitar class with anna"),
                    ("c3", "dentist appointment"),
                    ("c4", "guitar concert tickets"),
                ],
            ),
            store(
                App::Reminders,
                &[
                    ("r1", "guitar class"),
                    ("r2", "buy milk"),
                    ("r3", "pay electricity bill"),
                    ("r4", "call mom about class"),
                ],
            ),
        )
    }

    #[test]
    fn fuse_stores_equals_manual_composition() {
        let p = persona([App::Calendar, App::Reminders]);
        let (a, b) = two_stores();
        let ctx = PersonaContext::build(&p, &[&a, &b], &EmbeddingConfig::default()).unwrap();
        let q = query("guitar class");
        let cfg = FusionConfig::default();
        let got = federated_retrieve(&q, &q.text, &ctx, &cfg, &Artifacts::default(), 10).unwrap();

        let terms = crate::retrieval::tokenize("guitar class");
        let ia = InvertedIndex::build(a.items.iter().map(|i| (i.id.clone(), i.text()))).unwrap();
        let ib = InvertedIndex::build(b.items.iter().map(|i| (i.id.clone(), i.text()))).unwrap();
        let la = bm25_topk(&ia, &terms, &Bm25Params::default(), 10);
        let lb = bm25_topk(&ib, &terms, &Bm25Params::default(), 10);
        assert_eq!(got, rrf_fuse(&[la, lb], 60.0, 10).unwrap());
        // both store winners tie at 1/61
        assert_eq!(got.entries()[0].score, got.entries()[1].score);
        assert_eq!(got.ids().take(2).collect::<Vec<_>>(), ["c2", "r1"]);
    }

    #[test]
    fn oracle_and_missing_model() {
        let p = persona([App::Calendar, App::Reminders]);
        let (a, b) = two_stores();
        let ctx = PersonaContext::build(&p, &[&a, &b], &EmbeddingConfig::default()).unwrap();
        let q = query("anything");
        let oracle = FusionConfig {
            backend: FusionBackend::Oracle,
            ..FusionConfig::default()
        };
        let got = federated_retrieve(&q, &q.text, &ctx, &oracle, &Artifacts::default(), 5).unwrap();
        assert_eq!(got.ids().collect::<Vec<_>>(), ["c2", "r1"]);
        let ltr = FusionConfig {
            backend: FusionBackend::Ltr,
            ..FusionConfig::default()
        };
        assert_eq!(
            federated_retrieve(&q, &q.text, &ctx, &ltr, &Artifacts::default(), 5),
            Err(FusionError::MissingModel)
        );
    }

    #[test]
    fn ltr_store_winners_tie() {
        let p = persona([App::Calendar, App::Reminders]);
        let (a, b) = two_stores();
        let ctx = PersonaContext::build(&p, &[&a, &b], &EmbeddingConfig::default()).unwrap();
        let model = LtrModel::constant(0.0, crate::ltr::default_schema());
        let art = Artifacts {
            ltr: Some(&model),
            ..Artifacts::default()
        };
        let cfg = FusionConfig {
            backend: FusionBackend::Ltr,
            ..FusionConfig::default()
        };
        let q = query("x");
        let got = federated_retrieve(&q, &q.text, &ctx, &cfg, &art, 10).unwrap();
        assert_eq!(got.entries()[0].score, 1.0 / 61.0);
        assert_eq!(got.entries()[1].score, 1.0 / 61.0);
        assert_eq!(got.len(), 8);
    }

    #[test]
    fn foreign_store_rejected() {
        let p = persona([App::Calendar, App::Reminders]);
        let (mut a, _) = two_stores();
        a.persona_id = "p2".into();
        assert!(matches!(
            PersonaContext::build(&p, &[&a], &EmbeddingConfig::default()),
            Err(FusionError::ForeignStore { .. })
        ));
    }
}
