use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{default_schema, schema_hash, FeatureVector, QueryGroup};
use super::lambda::{delta_ndcg, ideal_dcg, lambdas_at, positions};
use super::tree::{fit_tree, Columns, Presorted, RegressionTree};
use crate::math;
use crate::retrieval::{RankedList, RetrievalError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrainError {
    #[error("no query group has a relevance contrast to learn from")]
    NoTrainablePairs,
    #[error("invalid training config: {0}")]
    BadConfig(String),
    #[error("feature schema mismatch: model expects {expected} features, got {got}")]
    SchemaMismatch { expected: usize, got: usize },
    #[error("non-finite feature value in row {0}")]
    NonFinite(usize),
    #[error(transparent)]
    Ranking(#[from] RetrievalError),
}

/// LambdaMART hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub sigma: f64,
    pub max_leaves: usize,
    /// `None` means `max(20, 1% of training rows)`.
    pub min_samples_leaf: Option<usize>,
    pub ndcg_cutoff: usize,
    pub base_score: f64,
    /// Fraction of query groups each tree is fitted on; 1.0 uses all of them.
    pub subsample: f64,
    /// Seeds the group subsampling.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            n_trees: 300,
            learning_rate: 0.1,
            sigma: 1.0,
            max_leaves: 31,
            min_samples_leaf: None,
            ndcg_cutoff: 10,
            base_score: 0.0,
            subsample: 1.0,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::BadConfig(m.into()));
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return bad("sigma must be positive");
        }
        if self.max_leaves < 1 {
            return bad("max_leaves must be at least 1");
        }
        if self.ndcg_cutoff < 1 {
            return bad("ndcg_cutoff must be at least 1");
        }
        if !self.base_score.is_finite() {
            return bad("base_score must be finite");
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return bad("subsample must be in (0, 1]");
        }
        if self.min_samples_leaf == Some(0) {
            return bad("min_samples_leaf must be at least 1");
        }
        Ok(())
    }

    pub fn min_samples_leaf_for(&self, n_rows: usize) -> usize {
        self.min_samples_leaf
            .unwrap_or_else(|| 20.max(n_rows / 100))
    }
}

/// Gradient-boosted regression-tree ranker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtrModel {
    pub trees: Vec<RegressionTree>,
    pub learning_rate: f64,
    pub base_score: f64,
    pub feature_schema: Vec<String>,
    pub sigma: f64,
}

impl LtrModel {
    /// A model without trees: every row scores `base_score`.
    pub fn constant(base_score: f64, feature_schema: Vec<String>) -> Self {
        Self {
            trees: Vec::new(),
            learning_rate: 0.1,
            base_score,
            feature_schema,
            sigma: 1.0,
        }
    }

    pub fn schema_hash(&self) -> u64 {
        schema_hash(&self.feature_schema)
    }

    pub fn n_features(&self) -> usize {
        self.feature_schema.len()
    }

    /// `base_score + learning_rate * sum of tree outputs`.
    pub fn score(&self, x: &[f64]) -> f64 {
        self.base_score + self.learning_rate * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    fn check_row(&self, i: usize, row: &FeatureVector) -> Result<(), TrainError> {
        if row.values.len() != self.n_features() {
            return Err(TrainError::SchemaMismatch {
                expected: self.n_features(),
                got: row.values.len(),
            });
        }
        if !row.is_finite() {
            return Err(TrainError::NonFinite(i));
        }
        Ok(())
    }

    pub fn predict(&self, rows: &[FeatureVector]) -> Result<Vec<f64>, TrainError> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| {
                self.check_row(i, r)?;
                Ok(self.score(&r.values))
            })
            .collect()
    }

    /// Scores candidates and returns the top `k` as a ranked list.
    pub fn rank<S: AsRef<str>>(
        &self,
        candidates: &[(S, FeatureVector)],
        k: usize,
    ) -> Result<RankedList, TrainError> {
        let mut scored = Vec::with_capacity(candidates.len());
        for (i, (id, row)) in candidates.iter().enumerate() {
            self.check_row(i, row)?;
            scored.push((String::from(id.as_ref()), self.score(&row.values)));
        }
        Ok(RankedList::from_scores(scored, k)?)
    }

    /// True when every tree is well formed for the schema.
    pub fn is_valid(&self) -> bool {
        self.learning_rate.is_finite()
            && self.learning_rate > 0.0
            && self.sigma.is_finite()
            && self.sigma > 0.0
            && self.base_score.is_finite()
            && self.trees.iter().all(|t| t.is_valid(self.n_features()))
    }
}

/// Mean training NDCG of the ranking a boosting round starts from, the one
/// its gradients are computed on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundStat {
    pub round: usize,
    pub mean_train_ndcg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: LtrModel,
    /// One entry per round; round 1 reflects the untrained model.
    pub log: Vec<RoundStat>,
    /// Mean training NDCG of the finished model.
    pub final_ndcg: f64,
}

struct Group {
    start: usize,
    rels: Vec<u32>,
    idcg: f64,
}

fn group_ndcg(g: &Group, pos: &[usize], cutoff: usize) -> f64 {
    let dcg: f64 = g
        .rels
        .iter()
        .zip(pos)
        .filter(|(_, &p)| p <= cutoff)
        .map(|(&r, &p)| crate::metrics::gain(r) * math::discount(p))
        .sum();
    dcg / g.idcg
}

/// Trains a LambdaMART ranker with the default feature schema.
pub fn train(groups: &[QueryGroup], cfg: &TrainConfig) -> Result<TrainOutcome, TrainError> {
    train_with_schema(groups, default_schema(), cfg)
}

/// Trains a LambdaMART ranker.
///
/// Each round computes LambdaRank gradients for every trainable group at
/// the current scores, fits one tree to them and adds it with shrinkage.
/// Groups without a relevance contrast are skipped; rows within a group
/// are ordered by item id so score ties resolve as in [`RankedList`].
pub fn train_with_schema(
    groups: &[QueryGroup],
    schema: Vec<String>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    cfg.validate()?;
    let n_features = schema.len();
    if n_features == 0 {
        return Err(TrainError::BadConfig("feature schema is empty".into()));
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); n_features];
    let mut prepared: Vec<Group> = Vec::new();
    let mut row_no = 0;
    for g in groups.iter().filter(|g| g.is_trainable()) {
        let mut rows: Vec<_> = g.rows.iter().collect();
        rows.sort_by(|a, b| a.item_id.cmp(&b.item_id));
        let start = columns[0].len();
        for r in &rows {
            if r.features.values.len() != n_features {
                return Err(TrainError::SchemaMismatch {
                    expected: n_features,
                    got: r.features.values.len(),
                });
            }
            if !r.features.is_finite() {
                return Err(TrainError::NonFinite(row_no));
            }
            for (c, &v) in columns.iter_mut().zip(&r.features.values) {
                c.push(v);
            }
            row_no += 1;
        }
        let rels: Vec<u32> = rows.iter().map(|r| r.relevance).collect();
        let idcg = ideal_dcg(&rels, cfg.ndcg_cutoff);
        prepared.push(Group { start, rels, idcg });
    }
    if prepared.is_empty() {
        return Err(TrainError::NoTrainablePairs);
    }

    let n_rows = columns[0].len();
    let cols = Columns { columns: &columns };
    let presorted = Presorted::new(&cols);
    let min_leaf = cfg.min_samples_leaf_for(n_rows);
    let mut scores = vec![cfg.base_score; n_rows];
    let mut targets = vec![0.0; n_rows];
    let mut hessians = vec![0.0; n_rows];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..prepared.len()).collect();
    let n_sub =
        (math::round(prepared.len() as f64 * cfg.subsample) as usize).clamp(1, prepared.len());

    let mean_ndcg = |scores: &[f64]| -> f64 {
        let total: f64 = prepared
            .iter()
            .map(|g| {
                let s = &scores[g.start..g.start + g.rels.len()];
                group_ndcg(g, &positions(s, |i| i), cfg.ndcg_cutoff)
            })
            .sum();
        total / prepared.len() as f64
    };

    let mut log = Vec::with_capacity(cfg.n_trees);
    let mut trees = Vec::with_capacity(cfg.n_trees);
    for round in 1..=cfg.n_trees {
        log.push(RoundStat {
            round,
            mean_train_ndcg: mean_ndcg(&scores),
        });
        let subset: Option<Vec<u32>> = if n_sub < prepared.len() {
            order.shuffle(&mut rng);
            let mut rows: Vec<u32> = order[..n_sub]
                .iter()
                .flat_map(|&gi| {
                    let g = &prepared[gi];
                    (g.start as u32)..(g.start + g.rels.len()) as u32
                })
                .collect();
            rows.sort_unstable();
            Some(rows)
        } else {
            None
        };
        for g in &prepared {
            let range = g.start..g.start + g.rels.len();
            let s = &scores[range.clone()];
            let pos = positions(s, |i| i);
            let (l, h) = lambdas_at(&g.rels, s, &pos, cfg.sigma, cfg.ndcg_cutoff);
            targets[range.clone()].copy_from_slice(&l);
            hessians[range].copy_from_slice(&h);
        }
        let tree = fit_tree(
            &cols,
            &presorted,
            subset.as_deref(),
            &targets,
            &hessians,
            cfg.max_leaves,
            min_leaf,
        );
        let mut x = vec![0.0; n_features];
        for (row, s) in scores.iter_mut().enumerate() {
            for (v, c) in x.iter_mut().zip(&columns) {
                *v = c[row];
            }
            *s += cfg.learning_rate * tree.predict(&x);
        }
        trees.push(tree);
    }
    let final_ndcg = mean_ndcg(&scores);
    Ok(TrainOutcome {
        model: LtrModel {
            trees,
            learning_rate: cfg.learning_rate,
            base_score: cfg.base_score,
            feature_schema: schema,
            sigma: cfg.sigma,
        },
        log,
        final_ndcg,
    })
}

/// `|dNDCG|` of swapping two rows of a group at the given scores; exposed so
/// callers can check gradients against a metric implementation.
pub fn swap_delta(rels: &[u32], scores: &[f64], i: usize, j: usize, cutoff: usize) -> f64 {
    let pos = positions(scores, |r| r);
    delta_ndcg(
        rels[i],
        rels[j],
        pos[i],
        pos[j],
        cutoff,
        ideal_dcg(rels, cutoff),
    )
}
