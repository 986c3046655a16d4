use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::RetrievalError;

/// One entry of a [`RankedList`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub id: String,
    pub score: f64,
}

/// An ordered, scored list of item ids.
///
/// Scores are finite and non-increasing, ids are distinct, and equal scores
/// are ordered by ascending id. Every retrieval stage hands results to the
/// next one in this form.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RankedList {
    entries: Vec<Scored>,
}

pub(crate) fn rank_order(a: &Scored, b: &Scored) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.id.cmp(&b.id))
}

impl RankedList {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts arbitrary `(id, score)` pairs into a ranked list, keeping at
    /// most `k` entries.
    pub fn from_scores<I>(scores: I, k: usize) -> Result<Self, RetrievalError>
    where
        I: IntoIterator<Item = (String, f64)>,
    {
        let mut entries: Vec<Scored> = Vec::new();
        for (id, score) in scores {
            if !score.is_finite() {
                return Err(RetrievalError::NonFiniteScore { id });
            }
            // fold -0.0 into 0.0
            entries.push(Scored {
                id,
                score: score + 0.0,
            });
        }
        entries.sort_by(rank_order);
        let mut ids: Vec<&str> = entries.iter().map(|e| e.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(RetrievalError::DuplicateId(String::from(w[0])));
        }
        entries.truncate(k);
        Ok(Self { entries })
    }

    /// Builds a list whose order is exactly `ids`, scored `n, n-1, .., 1`.
    pub fn from_order<I, S>(ids: I) -> Result<Self, RetrievalError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let n = ids.len();
        let list = Self::from_scores(
            ids.into_iter()
                .enumerate()
                .map(|(i, id)| (id, (n - i) as f64)),
            n,
        )?;
        Ok(list)
    }

    pub fn entries(&self) -> &[Scored] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }

    pub fn top(&self, k: usize) -> &[Scored] {
        &self.entries[..k.min(self.entries.len())]
    }

    /// 1-based rank of `id`, if present.
    pub fn rank_of(&self, id: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.id == id).map(|p| p + 1)
    }

    pub fn truncated(mut self, k: usize) -> Self {
        self.entries.truncate(k);
        self
    }

    /// Checks every list invariant. Lists built through the constructors
    /// always pass; deserialized lists might not.
    pub fn check(&self) -> Result<(), RetrievalError> {
        for e in &self.entries {
            if !e.score.is_finite() {
                return Err(RetrievalError::NonFiniteScore { id: e.id.clone() });
            }
        }
        for w in self.entries.windows(2) {
            if rank_order(&w[0], &w[1]) != Ordering::Less {
                return Err(RetrievalError::BadParams(alloc::format!(
                    "entries `{}` and `{}` out of order",
                    w[0].id,
                    w[1].id
                )));
            }
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a RankedList {
    type Item = &'a Scored;
    type IntoIter = core::slice::Iter<'a, Scored>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
