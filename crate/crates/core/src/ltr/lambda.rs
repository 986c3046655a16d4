use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::math;
use crate::metrics::gain;

/// Truncated position discount: `1 / log2(1 + pos)` inside the cutoff, else 0.
fn discount_at(pos: usize, cutoff: usize) -> f64 {
    if pos <= cutoff {
        math::discount(pos)
    } else {
        0.0
    }
}

/// IDCG@cutoff of a relevance vector.
pub fn ideal_dcg(rels: &[u32], cutoff: usize) -> f64 {
    let mut sorted = rels.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    crate::metrics::dcg_at_k(&sorted, cutoff)
}

/// 1-based positions of the rows when sorted by descending score, ties
/// broken by `tie_key` ascending (item ids in practice).
pub fn positions<K: Ord>(scores: &[f64], tie_key: impl Fn(usize) -> K) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then_with(|| tie_key(a).cmp(&tie_key(b)))
    });
    let mut pos = vec![0; scores.len()];
    for (p, &row) in order.iter().enumerate() {
        pos[row] = p + 1;
    }
    pos
}

/// `|NDCG change|` from swapping rows `i` and `j`, given their positions.
pub fn delta_ndcg(
    rel_i: u32,
    rel_j: u32,
    pos_i: usize,
    pos_j: usize,
    cutoff: usize,
    idcg: f64,
) -> f64 {
    if idcg == 0.0 {
        return 0.0;
    }
    ((gain(rel_i) - gain(rel_j)) * (discount_at(pos_i, cutoff) - discount_at(pos_j, cutoff))).abs()
        / idcg
}

/// LambdaRank gradients and hessians for one query group.
///
/// For each pair with `rel_i > rel_j`, `rho = 1 / (1 + exp(sigma (s_i - s_j)))`
/// and `lambda_i += sigma rho |dNDCG|`, `lambda_j -= sigma rho |dNDCG|`;
/// both hessians grow by `sigma^2 rho (1 - rho) |dNDCG|`. Positions come
/// from the current scores with ties ordered by `pos`.
pub fn lambdas_at(
    rels: &[u32],
    scores: &[f64],
    pos: &[usize],
    sigma: f64,
    cutoff: usize,
) -> (Vec<f64>, Vec<f64>) {
    let n = rels.len();
    let mut lambdas = vec![0.0; n];
    let mut hessians = vec![0.0; n];
    let idcg = ideal_dcg(rels, cutoff);
    if idcg == 0.0 {
        return (lambdas, hessians);
    }
    for i in 0..n {
        for j in 0..n {
            if rels[i] <= rels[j] {
                continue;
            }
            let d = delta_ndcg(rels[i], rels[j], pos[i], pos[j], cutoff, idcg);
            if d == 0.0 {
                continue;
            }
            let rho = 1.0 / (1.0 + math::exp(sigma * (scores[i] - scores[j])));
            let l = sigma * rho * d;
            lambdas[i] += l;
            lambdas[j] -= l;
            let h = sigma * sigma * rho * (1.0 - rho) * d;
            hessians[i] += h;
            hessians[j] += h;
        }
    }
    (lambdas, hessians)
}

/// [`lambdas_at`] with positions derived from `scores`, ties broken by row
/// order (rows are kept in ascending item-id order).
pub fn lambda_gradients(
    rels: &[u32],
    scores: &[f64],
    sigma: f64,
    cutoff: usize,
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(rels.len(), scores.len(), "scores must align with rows");
    let pos = positions(scores, |i| i);
    lambdas_at(rels, scores, &pos, sigma, cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows_equal_scores() {
        let (l, h) = lambda_gradients(&[1, 0], &[0.0, 0.0], 1.0, 10);
        // positions 1 and 2; |dNDCG| = (1 - 1/log2 3) / 1
        let d = 1.0 - 1.0 / 3f64.log2();
        assert!((l[0] - 0.5 * d).abs() < 1e-12);
        assert!((l[1] + 0.5 * d).abs() < 1e-12);
        assert!((h[0] - 0.25 * d).abs() < 1e-12 && h[0] == h[1]);
    }

    #[test]
    fn equal_relevance_is_zero() {
        let (l, h) = lambda_gradients(&[1, 1, 1], &[0.3, 0.1, 0.2], 1.0, 10);
        assert!(l.iter().chain(&h).all(|&v| v == 0.0));
    }

    #[test]
    fn three_row_golden() {
        // independent double-loop evaluation of the same formulas
        let (l, h) = lambda_gradients(&[2, 1, 0], &[0.1, 0.2, 0.3], 1.0, 3);
        let want_l = [0.265_006_996_2, 0.015_501_100_4, -0.280_508_096_6];
        let want_h = [0.120_238_169_2, 0.043_332_913_1, 0.127_601_514_5];
        for i in 0..3 {
            assert!((l[i] - want_l[i]).abs() < 1e-9, "lambda {i}: {}", l[i]);
            assert!((h[i] - want_h[i]).abs() < 1e-9, "hessian {i}: {}", h[i]);
        }
        assert!(l.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn beyond_cutoff_pairs_vanish() {
        // positions 2 and 3 both fall outside a cutoff of 1
        let (l, _) = lambda_gradients(&[0, 0, 1], &[0.9, 0.8, 0.1], 1.0, 1);
        assert!(
            l[1] == 0.0,
            "pair between positions 2 and 3 contributes nothing"
        );
        assert!(l[2] > 0.0 && l[0] < 0.0);
    }
}
