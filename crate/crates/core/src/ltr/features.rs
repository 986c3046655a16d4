use alloc::string::{String, ToString};
use alloc::vec::Vec;

use chrono::{DateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::corpus::{App, ContextItem, LabeledQuery, Persona};
use crate::hash::fnv1a64;
use crate::math;
use crate::retrieval::{bm25_score, tokenize, Bm25Params, Embedder, Embedding, InvertedIndex};

/// Feature names in vector order.
pub const FEATURE_SCHEMA: [&str; 13] = [
    "bm25_score",
    "cosine_sim",
    "access_count_log",
    "recency_days",
    "hour_of_day_match",
    "app_usage_weight",
    "app_mail",
    "app_calendar",
    "app_google",
    "app_music",
    "app_reminders",
    "app_notes",
    "app_phonecall",
];

pub const N_FEATURES: usize = FEATURE_SCHEMA.len();

/// Bumped whenever a feature's meaning changes without its name changing.
pub const SCHEMA_VERSION: u32 = 1;

/// Hours apart (on the 24-hour clock) that still count as the same time of day.
pub const HOUR_MATCH_WINDOW: u32 = 2;

/// Stable hash of a schema, stored with models to catch mismatches.
pub fn schema_hash<S: AsRef<str>>(names: &[S]) -> u64 {
    let mut text = alloc::format!("v{SCHEMA_VERSION}");
    for n in names {
        text.push('\n');
        text.push_str(n.as_ref());
    }
    fnv1a64(text.as_bytes())
}

pub fn default_schema() -> Vec<String> {
    FEATURE_SCHEMA.iter().map(|s| s.to_string()).collect()
}

/// One row of features in schema order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// A labeled row of a query group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub item_id: String,
    pub features: FeatureVector,
    pub relevance: u32,
}

/// All candidate rows of one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryGroup {
    pub query_id: String,
    pub rows: Vec<GroupRow>,
}

impl QueryGroup {
    /// Usable for training: two or more rows and some relevance contrast.
    pub fn is_trainable(&self) -> bool {
        self.rows.len() >= 2
            && self.rows.iter().any(|r| r.relevance > 0)
            && self
                .rows
                .iter()
                .any(|r| r.relevance != self.rows[0].relevance)
    }
}

/// True when two hours of day are at most [`HOUR_MATCH_WINDOW`] apart,
/// measured around the clock (23:00 and 01:00 are 2 hours apart).
pub fn hours_match(a: u32, b: u32) -> bool {
    let d = a.abs_diff(b) % 24;
    d.min(24 - d) <= HOUR_MATCH_WINDOW
}

/// Query-side inputs shared by every candidate of the query.
#[derive(Debug, Clone)]
pub struct QuerySignals {
    pub terms: Vec<String>,
    pub embedding: Embedding,
    pub timestamp: DateTime<Utc>,
}

impl QuerySignals {
    pub fn new(text: &str, embedding: Embedding, timestamp: DateTime<Utc>) -> Self {
        Self {
            terms: tokenize(text),
            embedding,
            timestamp,
        }
    }
}

/// Features of one candidate given precomputed query signals and the
/// item's embedding. `index` is the persona's pooled BM25 index.
pub fn item_features(
    q: &QuerySignals,
    item: &ContextItem,
    item_embedding: &Embedding,
    persona: &Persona,
    index: &InvertedIndex,
    bm25: &Bm25Params,
) -> FeatureVector {
    let mut v = Vec::with_capacity(N_FEATURES);
    v.push(bm25_score(index, &item.id, &q.terms, bm25));
    v.push(q.embedding.dot(item_embedding));
    v.push(math::ln_1p(item.access_count as f64));
    let secs = (q.timestamp - item.timestamp).num_seconds().max(0);
    v.push(secs as f64 / 86_400.0);
    v.push(if hours_match(q.timestamp.hour(), item.timestamp.hour()) {
        1.0
    } else {
        0.0
    });
    v.push(persona.usage_weight(item.app));
    for app in App::ALL {
        v.push(if item.app == app { 1.0 } else { 0.0 });
    }
    FeatureVector::new(v)
}

/// Features of `(query, item)`: BM25 against `index`, cosine between the
/// query and item embeddings from `embedder`, then the item's usage, time
/// and app signals.
pub fn extract_features(
    query: &LabeledQuery,
    item: &ContextItem,
    persona: &Persona,
    index: &InvertedIndex,
    embedder: &dyn Embedder,
) -> FeatureVector {
    let signals = QuerySignals::new(
        &query.text,
        embedder.embed(&query.id, &query.text),
        query.timestamp,
    );
    let item_emb = embedder.embed(&item.id, &item.text());
    item_features(
        &signals,
        item,
        &item_emb,
        persona,
        index,
        &Bm25Params::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Plan, Split};
    use crate::retrieval::HashedEmbedder;
    use alloc::collections::BTreeMap;
    use alloc::vec;
    use chrono::TimeZone;

    fn item(text: &str, ts: DateTime<Utc>, access: u32) -> ContextItem {
        ContextItem {
            id: "i1".into(),
            app: App::Notes,
            title: text.into(),
            body: String::new(),
            timestamp: ts,
            categorical_tags: BTreeMap::new(),
            access_count: access,
        }
    }

    fn persona() -> Persona {
        Persona {
            id: "p".into(),
            attributes: BTreeMap::new(),
            app_usage_profile: App::ALL.iter().map(|&a| (a, 1.0 / 7.0)).collect(),
        }
    }

    fn query(text: &str, ts: DateTime<Utc>) -> LabeledQuery {
        LabeledQuery {
            id: "q".into(),
            persona_id: "p".into(),
            text: text.into(),
            timestamp: ts,
            gold_context_ids: vec!["i1".into()],
            gold_tools: vec!["open_note".into()],
            gold_plan: Plan::new("open_note"),
            split: Split::Test,
        }
    }

    #[test]
    fn trivial_examples() {
        let ts = Utc.with_ymd_and_hms(2023, 12, 1, 9, 30, 0).unwrap();
        let it = item("diet plan", ts, 0);
        let docs = [("i1", "diet plan"), ("i2", "guitar class")];
        let emb = HashedEmbedder::words(docs, 64).unwrap();
        let f = extract_features(&query("diet plan", ts), &it, &persona(), emb.index(), &emb);
        assert_eq!(f.values.len(), N_FEATURES);
        assert!((f.values[1] - 1.0).abs() < 1e-9);
        assert_eq!(f.values[2], 0.0);
        assert_eq!(f.values[3], 0.0);
        assert_eq!(f.values[4], 1.0);
        assert_eq!(f.values[6 + App::Notes.index()], 1.0);
        assert_eq!(f.values[6..].iter().sum::<f64>(), 1.0);
        assert!(f.values[0] > 0.0);
    }

    #[test]
    fn recency_clamped_and_hours_wrap() {
        let ts = Utc.with_ymd_and_hms(2023, 12, 1, 23, 0, 0).unwrap();
        let later = Utc.with_ymd_and_hms(2023, 12, 3, 1, 0, 0).unwrap();
        let it = item("x", later, 3);
        let emb = HashedEmbedder::words([("i1", "x")], 16).unwrap();
        let f = extract_features(&query("x", ts), &it, &persona(), emb.index(), &emb);
        assert_eq!(f.values[3], 0.0);
        assert_eq!(f.values[4], 1.0);
        assert!((f.values[2] - 4f64.ln()).abs() < 1e-12);
        assert!(hours_match(0, 22) && !hours_match(0, 21) && hours_match(10, 12));
    }

    #[test]
    fn schema_hash_tracks_names() {
        let a = schema_hash(&FEATURE_SCHEMA);
        assert_eq!(a, schema_hash(&default_schema()));
        let mut other = default_schema();
        other.swap(0, 1);
        assert_ne!(a, schema_hash(&other));
    }
}
