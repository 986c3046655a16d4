use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{tokenize, RetrievalError};
use crate::math;

/// Inverted index over a fixed document set.
///
/// Exposes the statistics BM25 and TF-IDF weighting need: document
/// frequency, term frequency, document length and average document length.
#[derive(Debug, Clone, Default)]
pub struct InvertedIndex {
    ids: Vec<String>,
    lens: Vec<u32>,
    by_id: BTreeMap<String, u32>,
    postings: BTreeMap<String, Vec<(u32, u32)>>,
    total_len: u64,
}

impl InvertedIndex {
    /// Tokenizes each document with [`tokenize`] and indexes the terms.
    pub fn build<I, S, T>(docs: I) -> Result<Self, RetrievalError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: AsRef<str>,
    {
        Self::build_with(docs, tokenize)
    }

    /// Like [`build`](Self::build) with a caller-supplied analyzer.
    pub fn build_with<I, S, T, F>(docs: I, analyze: F) -> Result<Self, RetrievalError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: AsRef<str>,
        F: Fn(&str) -> Vec<String>,
    {
        let mut index = Self::default();
        for (id, text) in docs {
            let id = id.into();
            let terms = analyze(text.as_ref());
            index.insert(id, terms)?;
        }
        Ok(index)
    }

    fn insert(&mut self, id: String, terms: Vec<String>) -> Result<(), RetrievalError> {
        if self.by_id.contains_key(&id) {
            return Err(RetrievalError::DuplicateId(id));
        }
        let doc = self.ids.len() as u32;
        let mut tf: BTreeMap<String, u32> = BTreeMap::new();
        for t in &terms {
            *tf.entry(t.clone()).or_insert(0) += 1;
        }
        for (term, count) in tf {
            self.postings.entry(term).or_default().push((doc, count));
        }
        self.lens.push(terms.len() as u32);
        self.total_len += terms.len() as u64;
        self.by_id.insert(id.clone(), doc);
        self.ids.push(id);
        Ok(())
    }

    pub fn n_docs(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn contains_doc(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    pub fn df(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    pub fn tf(&self, term: &str, doc_id: &str) -> u32 {
        let Some(&doc) = self.by_id.get(doc_id) else {
            return 0;
        };
        self.postings
            .get(term)
            .and_then(|p| {
                p.binary_search_by_key(&doc, |&(d, _)| d)
                    .ok()
                    .map(|i| p[i].1)
            })
            .unwrap_or(0)
    }

    pub fn doc_len(&self, doc_id: &str) -> Option<u32> {
        self.by_id.get(doc_id).map(|&d| self.lens[d as usize])
    }

    /// Mean document length in terms; 0 for an empty index.
    pub fn avg_doc_len(&self) -> f64 {
        if self.ids.is_empty() {
            0.0
        } else {
            self.total_len as f64 / self.ids.len() as f64
        }
    }

    /// `ln(1 + (N - df + 0.5) / (df + 0.5))`, strictly positive.
    pub fn idf(&self, term: &str) -> f64 {
        let n = self.ids.len() as f64;
        let df = self.df(term) as f64;
        math::ln_1p((n - df + 0.5) / (df + 0.5))
    }

    pub(crate) fn postings(&self, term: &str) -> &[(u32, u32)] {
        self.postings.get(term).map_or(&[], Vec::as_slice)
    }

    pub(crate) fn doc_index(&self, id: &str) -> Option<u32> {
        self.by_id.get(id).copied()
    }

    pub(crate) fn len_of(&self, doc: u32) -> u32 {
        self.lens[doc as usize]
    }

    pub(crate) fn id_of(&self, doc: u32) -> &str {
        &self.ids[doc as usize]
    }
}
