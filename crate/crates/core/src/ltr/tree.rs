use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Leaf values are clipped to this magnitude.
pub const LEAF_CLIP: f64 = 10.0;
const HESSIAN_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go to `left`.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// Binary regression tree stored as a node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn leaf(value: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf { value }],
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    /// Nodes in preorder (node, then left subtree, then right subtree).
    pub fn preorder(&self) -> Vec<Node> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            out.push(self.nodes[i]);
            if let Node::Split { left, right, .. } = self.nodes[i] {
                stack.push(right);
                stack.push(left);
            }
        }
        out
    }

    /// Rebuilds a tree from preorder nodes; child indices in the input are
    /// ignored and reassigned. Fails on truncated or trailing input.
    pub fn from_preorder(pre: &[Node]) -> Option<Self> {
        fn build(pre: &[Node], pos: &mut usize, out: &mut Vec<Node>) -> Option<usize> {
            let node = *pre.get(*pos)?;
            *pos += 1;
            let at = out.len();
            out.push(node);
            if let Node::Split {
                feature, threshold, ..
            } = node
            {
                let left = build(pre, pos, out)?;
                let right = build(pre, pos, out)?;
                out[at] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
            }
            Some(at)
        }
        let mut out = Vec::with_capacity(pre.len());
        let mut pos = 0;
        build(pre, &mut pos, &mut out)?;
        (pos == pre.len()).then_some(Self { nodes: out })
    }

    /// Checks the structural invariants against a feature count.
    pub fn is_valid(&self, n_features: usize) -> bool {
        !self.nodes.is_empty()
            && self.nodes.iter().all(|n| match *n {
                Node::Leaf { value } => value.is_finite(),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    feature < n_features
                        && threshold.is_finite()
                        && left < self.nodes.len()
                        && right < self.nodes.len()
                }
            })
    }
}

/// Column-major view of the training rows: `columns[f][row]`.
pub struct Columns<'a> {
    pub columns: &'a [Vec<f64>],
}

impl Columns<'_> {
    fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

/// Per-feature row indices sorted by feature value, built once and reused
/// by every tree of an ensemble.
pub struct Presorted {
    order: Vec<Vec<u32>>,
}

impl Presorted {
    pub fn new(cols: &Columns<'_>) -> Self {
        let n = cols.n_rows();
        let order = cols
            .columns
            .iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..n as u32).collect();
                idx.sort_by(|&a, &b| {
                    col[a as usize]
                        .partial_cmp(&col[b as usize])
                        .unwrap_or(core::cmp::Ordering::Equal)
                        .then(a.cmp(&b))
                });
                idx
            })
            .collect();
        Self { order }
    }
}

#[derive(Debug, Clone, Copy)]
struct SplitChoice {
    gain: f64,
    feature: usize,
    threshold: f64,
}

struct Pending {
    node: usize,
    /// Per-feature sorted row lists of the rows in this node.
    rows: Vec<Vec<u32>>,
    best: Option<SplitChoice>,
}

fn leaf_value(rows: &[u32], targets: &[f64], hessians: &[f64]) -> f64 {
    let (t, h) = rows.iter().fold((0.0, 0.0), |(t, h), &r| {
        (t + targets[r as usize], h + hessians[r as usize])
    });
    (t / (h + HESSIAN_EPS)).clamp(-LEAF_CLIP, LEAF_CLIP)
}

fn best_split(
    rows: &[Vec<u32>],
    cols: &Columns<'_>,
    targets: &[f64],
    min_leaf: usize,
) -> Option<SplitChoice> {
    let n = rows[0].len();
    if n < 2 * min_leaf {
        return None;
    }
    let total: f64 = rows[0].iter().map(|&r| targets[r as usize]).sum();
    let base = total * total / n as f64;
    let mut best: Option<SplitChoice> = None;
    for (f, sorted) in rows.iter().enumerate() {
        let col = &cols.columns[f];
        let mut left_sum = 0.0;
        for i in 0..n - 1 {
            let r = sorted[i] as usize;
            left_sum += targets[r];
            let nl = i + 1;
            if nl < min_leaf {
                continue;
            }
            if n - nl < min_leaf {
                break;
            }
            let x = col[r];
            let next = col[sorted[i + 1] as usize];
            if x == next {
                continue;
            }
            let right_sum = total - left_sum;
            let gain =
                left_sum * left_sum / nl as f64 + right_sum * right_sum / (n - nl) as f64 - base;
            if gain > 1e-12 && best.is_none_or(|b| gain > b.gain) {
                best = Some(SplitChoice {
                    gain,
                    feature: f,
                    threshold: x,
                });
            }
        }
    }
    best
}

/// Fits a regression tree to `targets` by best-first growth.
///
/// The leaf with the largest squared-error reduction is split next until
/// `max_leaves` leaves exist or no split leaves `min_samples_leaf` rows on
/// both sides. Leaves hold the Newton step `sum(t) / (sum(h) + 1e-9)`,
/// clipped to `[-10, 10]`. `rows` restricts fitting to a subset.
pub fn fit_tree(
    cols: &Columns<'_>,
    presorted: &Presorted,
    rows: Option<&[u32]>,
    targets: &[f64],
    hessians: &[f64],
    max_leaves: usize,
    min_samples_leaf: usize,
) -> RegressionTree {
    let n_rows = cols.n_rows();
    let min_leaf = min_samples_leaf.max(1);
    let root_rows: Vec<Vec<u32>> = match rows {
        None => presorted.order.clone(),
        Some(subset) => {
            let mut mask = vec![false; n_rows];
            for &r in subset {
                mask[r as usize] = true;
            }
            presorted
                .order
                .iter()
                .map(|o| o.iter().copied().filter(|&r| mask[r as usize]).collect())
                .collect()
        }
    };
    if root_rows.is_empty() || root_rows[0].is_empty() {
        return RegressionTree::leaf(0.0);
    }

    let mut nodes = vec![Node::Leaf {
        value: leaf_value(&root_rows[0], targets, hessians),
    }];
    let best = best_split(&root_rows, cols, targets, min_leaf);
    let mut open = vec![Pending {
        node: 0,
        rows: root_rows,
        best,
    }];
    let mut in_left = vec![false; n_rows];
    let mut leaves = 1;

    while leaves < max_leaves.max(1) {
        // largest gain wins; the earliest-created leaf breaks ties
        let Some(pick) = open
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.best.map(|b| (i, b.gain)))
            .fold(None, |acc: Option<(usize, f64)>, (i, g)| match acc {
                Some((_, bg)) if bg >= g => acc,
                _ => Some((i, g)),
            })
            .map(|(i, _)| i)
        else {
            break;
        };
        let p = open.remove(pick);
        let split = p.best.unwrap();
        let col = &cols.columns[split.feature];
        for &r in &p.rows[0] {
            in_left[r as usize] = col[r as usize] <= split.threshold;
        }
        let mut left_rows = Vec::with_capacity(p.rows.len());
        let mut right_rows = Vec::with_capacity(p.rows.len());
        for sorted in p.rows {
            let (l, r): (Vec<u32>, Vec<u32>) =
                sorted.into_iter().partition(|&r| in_left[r as usize]);
            left_rows.push(l);
            right_rows.push(r);
        }
        let left = nodes.len();
        let right = left + 1;
        nodes.push(Node::Leaf {
            value: leaf_value(&left_rows[0], targets, hessians),
        });
        nodes.push(Node::Leaf {
            value: leaf_value(&right_rows[0], targets, hessians),
        });
        nodes[p.node] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        leaves += 1;
        for (node, rows) in [(left, left_rows), (right, right_rows)] {
            let best = best_split(&rows, cols, targets, min_leaf);
            open.push(Pending { node, rows, best });
        }
    }
    // lay the arena out in preorder so the node order does not depend on
    // the order splits were made, and a reloaded tree compares equal
    let grown = RegressionTree { nodes };
    RegressionTree::from_preorder(&grown.preorder()).expect("a grown tree is complete")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(columns: &[Vec<f64>], t: &[f64], max_leaves: usize, min_leaf: usize) -> RegressionTree {
        let cols = Columns { columns };
        let pre = Presorted::new(&cols);
        let h = vec![1.0; t.len()];
        fit_tree(&cols, &pre, None, t, &h, max_leaves, min_leaf)
    }

    #[test]
    fn constant_targets_give_one_leaf() {
        let x = vec![vec![1.0, 2.0, 3.0, 4.0]];
        let tree = fit(&x, &[2.5; 4], 31, 1);
        assert_eq!(tree.n_leaves(), 1);
        assert!((tree.predict(&[0.0]) - 2.5).abs() < 1e-9);
    }

    #[test]
    fn separable_split_reproduces_means() {
        let x = vec![
            vec![0.1, 0.2, 0.3, 0.7, 0.8, 0.9],
            vec![5.0, 1.0, 4.0, 2.0, 6.0, 3.0],
        ];
        let t = [1.0, 1.0, 1.0, -2.0, -2.0, -2.0];
        let tree = fit(&x, &t, 2, 1);
        assert_eq!(tree.n_leaves(), 2);
        match tree.nodes()[0] {
            Node::Split {
                feature, threshold, ..
            } => {
                assert_eq!(feature, 0);
                assert_eq!(threshold, 0.3);
            }
            Node::Leaf { .. } => panic!("expected split"),
        }
        assert!((tree.predict(&[0.2, 0.0]) - 1.0).abs() < 1e-8);
        assert!((tree.predict(&[0.95, 0.0]) + 2.0).abs() < 1e-8);
    }

    #[test]
    fn min_samples_leaf_blocks_split() {
        let x = vec![vec![0.0, 1.0, 2.0, 3.0]];
        let tree = fit(&x, &[1.0, 0.0, 0.0, 0.0], 31, 3);
        assert_eq!(tree.n_leaves(), 1);
    }

    #[test]
    fn leaves_are_clipped() {
        let x = vec![vec![0.0, 1.0]];
        let cols = Columns { columns: &x };
        let pre = Presorted::new(&cols);
        let tree = fit_tree(&cols, &pre, None, &[5.0, 5.0], &[0.0, 0.0], 1, 1);
        assert_eq!(tree.predict(&[0.0]), LEAF_CLIP);
    }

    #[test]
    fn beats_single_leaf_baseline() {
        // 50 rows from a fixed LCG
        let mut s = 12345u64;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let x: Vec<Vec<f64>> = (0..3).map(|_| (0..50).map(|_| next()).collect()).collect();
        let t: Vec<f64> = (0..50)
            .map(|i| x[0][i] * 2.0 - x[2][i] + next() * 0.1)
            .collect();
        let tree = fit(&x, &t, 8, 3);
        let mean = t.iter().sum::<f64>() / 50.0;
        let base: f64 = t.iter().map(|v| (v - mean).powi(2)).sum();
        let sse: f64 = (0..50)
            .map(|i| {
                let row = [x[0][i], x[1][i], x[2][i]];
                (t[i] - tree.predict(&row)).powi(2)
            })
            .sum();
        assert!(sse <= base, "{sse} > {base}");
        assert!(tree.n_leaves() > 1);
    }

    #[test]
    fn preorder_round_trip() {
        let x = vec![vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]];
        let tree = fit(&x, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], 4, 1);
        let back = RegressionTree::from_preorder(&tree.preorder()).unwrap();
        for v in 0..6 {
            assert_eq!(tree.predict(&[v as f64]), back.predict(&[v as f64]));
        }
        assert_eq!(
            RegressionTree::from_preorder(&back.preorder()).unwrap(),
            back
        );
        assert_eq!(back.n_leaves(), tree.n_leaves());
        assert!(RegressionTree::from_preorder(&tree.preorder()[..2]).is_none());
        assert!(back.is_valid(1));
    }
}
