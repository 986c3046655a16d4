use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::{FeatureVector, GroupRow, QueryGroup, N_FEATURES};

/// A learnable ranking task: in every group of `group_size` rows the one
/// with the largest feature 0 is relevant.
///
/// Feature 0 is stratified: the rows of a group take one slot each of
/// `[r / n, (r + 1) / n)` in random order, so one global threshold separates
/// each group's maximum from the rest. The other features are uniform
/// noise.
pub fn separable_groups(n_groups: usize, group_size: usize, seed: u64) -> Vec<QueryGroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slots: Vec<usize> = (0..group_size).collect();
    (0..n_groups)
        .map(|g| {
            slots.shuffle(&mut rng);
            let rows = slots
                .iter()
                .enumerate()
                .map(|(i, &slot)| {
                    let mut v: Vec<f64> = (0..N_FEATURES).map(|_| rng.random::<f64>()).collect();
                    v[0] = (slot as f64 + v[0]) / group_size as f64;
                    GroupRow {
                        item_id: format!("g{g:04}-i{i:03}"),
                        features: FeatureVector::new(v),
                        relevance: u32::from(slot + 1 == group_size),
                    }
                })
                .collect();
            QueryGroup {
                query_id: format!("g{g:04}"),
                rows,
            }
        })
        .collect()
}
