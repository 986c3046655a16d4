use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{tokenize, InvertedIndex, RankedList, RetrievalError};
use crate::hash::stable_hash64;
use crate::math;

/// Seed of the bucket hash. Changing it changes every hashed embedding.
pub const EMBEDDING_HASH_SEED: u64 = 0x5eed_c0de_2024_0001;

/// Weight of a character trigram relative to a whole word.
const SUBWORD_WEIGHT: f64 = 0.35;

/// A dense vector, L2-normalized unless it is the zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    values: Vec<f64>,
    zero: bool,
}

impl Embedding {
    /// Normalizes `values` to unit length. An all-zero input stays zero and
    /// is flagged. Non-finite components are rejected.
    pub fn normalized(mut values: Vec<f64>) -> Option<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let norm = math::sqrt(values.iter().map(|v| v * v).sum());
        if norm == 0.0 {
            return Some(Self { values, zero: true });
        }
        for v in &mut values {
            *v /= norm;
        }
        Some(Self {
            values,
            zero: false,
        })
    }

    pub fn zeros(dims: usize) -> Self {
        Self {
            values: vec![0.0; dims],
            zero: true,
        }
    }

    pub fn dims(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// True when the source text had no indexed terms (norm 0).
    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.values.iter().map(|v| v * v).sum())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }
}

fn check_dims(dims: usize) -> Result<(), RetrievalError> {
    if dims >= 16 && dims.is_power_of_two() {
        Ok(())
    } else {
        Err(RetrievalError::BadDims(dims))
    }
}

fn bucket_and_sign(term: &str, dims: usize) -> (usize, f64) {
    let h = stable_hash64(EMBEDDING_HASH_SEED, term.as_bytes());
    let bucket = (h & (dims as u64 - 1)) as usize;
    let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
    (bucket, sign)
}

fn hashed_vector<'a, I>(terms: I, dims: usize, idf_source: &InvertedIndex) -> Embedding
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let mut tf: BTreeMap<&str, f64> = BTreeMap::new();
    for (t, w) in terms {
        *tf.entry(t).or_insert(0.0) += w;
    }
    let mut values = vec![0.0; dims];
    for (term, weight) in tf {
        if idf_source.df(term) == 0 {
            continue;
        }
        let (bucket, sign) = bucket_and_sign(term, dims);
        values[bucket] += sign * weight * idf_source.idf(term);
    }
    Embedding::normalized(values).expect("idf and tf are finite")
}

/// Feature-hashed TF-IDF embedding of `text`.
///
/// Each token is hashed to a bucket and a sign; the bucket accumulates
/// `sign * tf * idf`. Tokens unknown to `idf_source` are ignored, so a text
/// with no indexed token yields the flagged zero vector.
pub fn embed_hashed_tfidf(
    text: &str,
    dims: usize,
    idf_source: &InvertedIndex,
) -> Result<Embedding, RetrievalError> {
    check_dims(dims)?;
    let tokens = tokenize(text);
    Ok(hashed_vector(
        tokens.iter().map(|t| (t.as_str(), 1.0)),
        dims,
        idf_source,
    ))
}

/// Word tokens followed by the boundary-marked character trigrams of every
/// token of four or more characters (`"lesson"` -> `<le`, `les`, ..., `on>`).
///
/// Trigram terms start with `#` so they never collide with a word.
pub fn subword_terms(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for tok in tokenize(text) {
        let chars: Vec<char> = core::iter::once('<')
            .chain(tok.chars())
            .chain(core::iter::once('>'))
            .collect();
        let long = chars.len() >= 6;
        out.push(tok);
        if long {
            for w in chars.windows(3) {
                let mut g = String::from("#");
                g.extend(w.iter());
                out.push(g);
            }
        }
    }
    out
}

fn subword_weight(term: &str) -> f64 {
    if term.starts_with('#') {
        SUBWORD_WEIGHT
    } else {
        1.0
    }
}

/// Produces embeddings for texts. `key` identifies the text's owner (an item
/// or query id) for embedders that serve precomputed vectors.
pub trait Embedder {
    fn dims(&self) -> usize;
    fn embed(&self, key: &str, text: &str) -> Embedding;
}

/// Hashed TF-IDF embedder that owns its idf source.
///
/// With `subwords` enabled the vocabulary also carries character trigrams,
/// which lets inflected forms (`lesson` / `lessons`) land close together;
/// the idf source must then be built with [`subword_terms`].
#[derive(Debug, Clone)]
pub struct HashedEmbedder {
    dims: usize,
    index: InvertedIndex,
    subwords: bool,
}

impl HashedEmbedder {
    /// Word-level embedder over `docs`.
    pub fn words<I, S, T>(docs: I, dims: usize) -> Result<Self, RetrievalError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: AsRef<str>,
    {
        check_dims(dims)?;
        Ok(Self {
            dims,
            index: InvertedIndex::build(docs)?,
            subwords: false,
        })
    }

    /// Word + trigram embedder over `docs`.
    pub fn subwords<I, S, T>(docs: I, dims: usize) -> Result<Self, RetrievalError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: AsRef<str>,
    {
        check_dims(dims)?;
        Ok(Self {
            dims,
            index: InvertedIndex::build_with(docs, subword_terms)?,
            subwords: true,
        })
    }

    pub fn index(&self) -> &InvertedIndex {
        &self.index
    }

    pub fn embed_text(&self, text: &str) -> Embedding {
        if self.subwords {
            let terms = subword_terms(text);
            hashed_vector(
                terms.iter().map(|t| (t.as_str(), subword_weight(t))),
                self.dims,
                &self.index,
            )
        } else {
            embed_hashed_tfidf(text, self.dims, &self.index).expect("dims checked at construction")
        }
    }
}

impl Embedder for HashedEmbedder {
    fn dims(&self) -> usize {
        self.dims
    }

    fn embed(&self, _key: &str, text: &str) -> Embedding {
        self.embed_text(text)
    }
}

/// Serves externally computed vectors by key, falling back to another
/// embedder (or the zero vector) for keys it does not know.
pub struct PrecomputedEmbedder<'a> {
    dims: usize,
    vectors: &'a BTreeMap<String, Embedding>,
    fallback: Option<&'a dyn Embedder>,
}

impl<'a> PrecomputedEmbedder<'a> {
    pub fn new(
        vectors: &'a BTreeMap<String, Embedding>,
        fallback: Option<&'a dyn Embedder>,
    ) -> Result<Self, RetrievalError> {
        let dims = vectors.values().next().map_or(0, Embedding::dims);
        for (id, v) in vectors {
            if v.dims() != dims {
                return Err(RetrievalError::DimMismatch {
                    id: id.clone(),
                    expected: dims,
                    got: v.dims(),
                });
            }
        }
        if let Some(fb) = fallback {
            if !vectors.is_empty() && fb.dims() != dims {
                return Err(RetrievalError::DimMismatch {
                    id: String::from("<fallback>"),
                    expected: dims,
                    got: fb.dims(),
                });
            }
        }
        Ok(Self {
            dims,
            vectors,
            fallback,
        })
    }
}

impl Embedder for PrecomputedEmbedder<'_> {
    fn dims(&self) -> usize {
        self.dims
    }

    fn embed(&self, key: &str, text: &str) -> Embedding {
        match (self.vectors.get(key), self.fallback) {
            (Some(v), _) => v.clone(),
            (None, Some(fb)) => fb.embed(key, text),
            (None, None) => Embedding::zeros(self.dims),
        }
    }
}

/// Exact top-`k` by dot product over pre-normalized vectors.
pub fn cosine_topk<'a, I, S>(
    query: &Embedding,
    candidates: I,
    k: usize,
) -> Result<RankedList, RetrievalError>
where
    I: IntoIterator<Item = (S, &'a Embedding)>,
    S: AsRef<str>,
{
    let mut scored = Vec::new();
    for (id, emb) in candidates {
        if emb.dims() != query.dims() {
            return Err(RetrievalError::DimMismatch {
                id: String::from(id.as_ref()),
                expected: query.dims(),
                got: emb.dims(),
            });
        }
        scored.push((String::from(id.as_ref()), query.dot(emb)));
    }
    RankedList::from_scores(scored, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_index() -> InvertedIndex {
        InvertedIndex::build([
            ("d1", "guitar class monday"),
            ("d2", "buy milk"),
            ("d3", "guitar tuner review"),
            ("d4", "guitar lesson with anna"),
        ])
        .unwrap()
    }

    #[test]
    fn deterministic_and_normalized() {
        let idx = toy_index();
        let a = embed_hashed_tfidf("guitar class", 64, &idx).unwrap();
        let b = embed_hashed_tfidf("guitar class", 64, &idx).unwrap();
        assert_eq!(a, b);
        assert!((a.norm() - 1.0).abs() < 1e-9);
        assert!(!a.is_zero());
    }

    #[test]
    fn unindexed_text_is_flagged_zero() {
        let e = embed_hashed_tfidf("violin recital", 64, &toy_index()).unwrap();
        assert!(e.is_zero());
        assert_eq!(e.norm(), 0.0);
    }

    #[test]
    fn rejects_bad_dims() {
        let idx = toy_index();
        assert_eq!(
            embed_hashed_tfidf("x", 8, &idx),
            Err(RetrievalError::BadDims(8))
        );
        assert_eq!(
            embed_hashed_tfidf("x", 48, &idx),
            Err(RetrievalError::BadDims(48))
        );
    }

    #[test]
    fn related_text_is_closer() {
        let idx = toy_index();
        let e = |t| embed_hashed_tfidf(t, 256, &idx).unwrap();
        let gc = e("guitar class");
        assert!(gc.dot(&e("guitar lesson")) > gc.dot(&e("buy milk")));
    }

    #[test]
    fn subwords_match_inflections() {
        let docs = [
            ("a", "guitar lessons"),
            ("b", "buy milk"),
            ("c", "weekly planner"),
        ];
        let words = HashedEmbedder::words(docs, 256).unwrap();
        let sub = HashedEmbedder::subwords(docs, 256).unwrap();
        let q = "lesson";
        assert!(words.embed_text(q).is_zero());
        let qs = sub.embed_text(q);
        assert!(qs.dot(&sub.embed_text("guitar lessons")) > 0.3);
        assert!(qs.dot(&sub.embed_text("buy milk")).abs() < 0.2);
    }

    #[test]
    fn subword_terms_shape() {
        let t = subword_terms("Run lesson");
        assert_eq!(t[0], "run");
        assert_eq!(t[1], "lesson");
        assert_eq!(t[2], "#<le");
        assert_eq!(t.last().unwrap(), "#on>");
        assert_eq!(t.len(), 2 + 6);
    }

    #[test]
    fn normalization_3_4_5() {
        let e = Embedding::normalized(vec![3.0, 4.0, 0.0, 0.0]).unwrap();
        assert_eq!(e.values(), &[0.6, 0.8, 0.0, 0.0]);
        assert!(Embedding::normalized(vec![f64::NAN]).is_none());
    }

    #[test]
    fn cosine_examples() {
        let q = Embedding::normalized(vec![1.0, 0.0]).unwrap();
        let same = q.clone();
        let orth = Embedding::normalized(vec![0.0, 1.0]).unwrap();
        let mut c = BTreeMap::new();
        c.insert(String::from("same"), same);
        c.insert(String::from("orth"), orth);
        let l = cosine_topk(&q, &c, 10).unwrap();
        assert_eq!(l.ids().collect::<Vec<_>>(), ["same", "orth"]);
        assert!((l.entries()[0].score - 1.0).abs() < 1e-6);
        assert_eq!(l.entries()[1].score, 0.0);
        let l1 = cosine_topk(&q, &c, 1).unwrap();
        assert_eq!(l1.len(), 1);
    }

    #[test]
    fn cosine_dim_mismatch() {
        let q = Embedding::normalized(vec![1.0, 0.0]).unwrap();
        let bad = Embedding::normalized(vec![1.0, 0.0, 0.0]).unwrap();
        let err = cosine_topk(&q, [("x", &bad)], 3).unwrap_err();
        assert!(matches!(err, RetrievalError::DimMismatch { .. }));
    }

    #[test]
    fn precomputed_falls_back() {
        let mut m = BTreeMap::new();
        m.insert(
            String::from("x"),
            Embedding::normalized(
                vec![0.0; 16]
                    .into_iter()
                    .enumerate()
                    .map(|(i, _)| if i == 0 { 1.0 } else { 0.0 })
                    .collect(),
            )
            .unwrap(),
        );
        let fb = HashedEmbedder::words([("a", "guitar")], 16).unwrap();
        let p = PrecomputedEmbedder::new(&m, Some(&fb)).unwrap();
        assert_eq!(p.embed("x", "anything").values()[0], 1.0);
        assert!(!p.embed("y", "guitar").is_zero());
        let bare = PrecomputedEmbedder::new(&m, None).unwrap();
        assert!(bare.embed("y", "guitar").is_zero());
    }
}
