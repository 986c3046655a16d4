//! Retrieval primitives shared by every stage.

mod bm25;
mod embed;
mod index;
mod ranked;
mod tokenize;

pub use bm25::{bm25_score, bm25_topk, Bm25Params};
pub use embed::{
    cosine_topk, embed_hashed_tfidf, subword_terms, Embedder, Embedding, HashedEmbedder,
    PrecomputedEmbedder, EMBEDDING_HASH_SEED,
};
pub use index::InvertedIndex;
pub use ranked::{RankedList, Scored};
pub use tokenize::tokenize;

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RetrievalError {
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("score for `{id}` is not finite")]
    NonFiniteScore { id: String },
    #[error("embedding dimension mismatch: expected {expected}, got {got} for `{id}`")]
    DimMismatch {
        id: String,
        expected: usize,
        got: usize,
    },
    #[error("embedding dims must be a power of two >= 16, got {0}")]
    BadDims(usize),
    #[error("invalid BM25 parameter: {0}")]
    BadParams(String),
}
