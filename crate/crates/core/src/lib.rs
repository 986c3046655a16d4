//! Context-tuned retrieval for tool planning.
//!
//! The crate covers the algorithmic side of a retrieval-augmented planner
//! that first looks up personal context (mail, calendar, notes, ...) for an
//! under-specified request and then uses it to pick a tool and resolve an
//! API call:
//!
//! * [`corpus`] - data model and a seeded synthetic corpus generator.
//! * [`retrieval`] - tokenization, BM25/BM25T, hashed TF-IDF embeddings,
//!   cosine top-k and the [`RankedList`] interchange type.
//! * [`ltr`] - feature extraction and a LambdaMART trainer.
//! * [`fusion`] - reciprocal rank fusion and federated context retrieval.
//! * [`metrics`] - Recall@K, NDCG@K, AST plan matching and report aggregation.
//! * [`pipeline`] - context tuning -> tool retrieval -> plan generation.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! the HTTP planner adapter live in the `ctune` companion crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod corpus;
pub mod fusion;
pub mod ltr;
pub mod metrics;
pub mod pipeline;
pub mod retrieval;

mod hash;
mod math;

pub use corpus::{
    App, ContextItem, ContextStore, Corpus, CorpusConfig, LabeledQuery, Persona, Plan, Split, Tool,
    ToolParam,
};
pub use fusion::{rrf_fuse, FusionBackend, FusionConfig, FusionMode};
pub use ltr::{LtrModel, TrainConfig};
pub use metrics::{ast_match, ndcg_at_k, recall_at_k, AstOutcome, EvalReport};
pub use retrieval::{Bm25Params, Embedding, InvertedIndex, RankedList, Scored};

pub use hash::{fnv1a64, stable_hash64};
