//! Regression-tree explainer: greedy binary splitting by squared-error
//! reduction, with depth and leaf-size limits.

use crate::error::{Error, Result};
use crate::num::Float;

#[derive(Debug, Clone)]
enum Node<F> {
    Leaf {
        prediction: F,
        n_rows: usize,
    },
    Split {
        feature: usize,
        /// Rows with value ≤ threshold go left.
        threshold: F,
        left: usize,
        right: usize,
        sse_reduction: F,
    },
}

#[derive(Debug, Clone)]
pub struct TreeExplainer<F> {
    nodes: Vec<Node<F>>,
    n_features: usize,
}

impl<F: Float> TreeExplainer<F> {
    pub fn predict(&self, features: &[F]) -> F {
        match self.nodes[self.leaf_of(features)] {
            Node::Leaf { prediction, .. } => prediction,
            Node::Split { .. } => unreachable!(),
        }
    }

    /// Index of the leaf node the feature row is routed to.
    pub fn leaf_of(&self, features: &[F]) -> usize {
        debug_assert_eq!(features.len(), self.n_features);
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { .. } => return at,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    at = if features[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Total squared-error reduction attributed to each feature's splits.
    pub fn importance(&self) -> Vec<F> {
        let mut scores = vec![F::zero(); self.n_features];
        for node in &self.nodes {
            if let Node::Split {
                feature,
                sse_reduction,
                ..
            } = node
            {
                scores[*feature] = scores[*feature] + *sse_reduction;
            }
        }
        scores
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_row_count(&self, leaf: usize) -> usize {
        match self.nodes[leaf] {
            Node::Leaf { n_rows, .. } => n_rows,
            Node::Split { .. } => panic!("node {leaf} is not a leaf"),
        }
    }

    /// (feature, threshold) of the root, if the tree splits at all.
    pub fn root_split(&self) -> Option<(usize, F)> {
        match self.nodes.first() {
            Some(Node::Split {
                feature, threshold, ..
            }) => Some((*feature, *threshold)),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        fn walk<F>(nodes: &[Node<F>], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

struct Builder<'a, F> {
    rows: &'a [Vec<F>],
    targets: &'a [F],
    max_depth: usize,
    min_leaf: usize,
    nodes: Vec<Node<F>>,
}

struct BestSplit<F> {
    feature: usize,
    threshold: F,
    reduction: F,
}

impl<F: Float> Builder<'_, F> {
    fn node_mean(&self, idx: &[u32]) -> F {
        let sum: F = idx.iter().map(|&i| self.targets[i as usize]).sum();
        sum / F::from_count(idx.len())
    }

    fn node_sse(&self, idx: &[u32]) -> F {
        let m = self.node_mean(idx);
        idx.iter()
            .map(|&i| {
                let d = self.targets[i as usize] - m;
                d * d
            })
            .sum()
    }

    /// Exact argmax over every (feature, midpoint-between-distinct-values)
    /// candidate producing two children of at least `min_leaf` rows.
    /// Ties keep the first candidate in (feature, ascending threshold) order.
    fn best_split(&self, idx: &[u32]) -> Option<BestSplit<F>> {
        let n = idx.len();
        let parent_sse = self.node_sse(idx);
        let n_features = self.rows[0].len();
        let mut best: Option<BestSplit<F>> = None;
        let mut order: Vec<u32> = idx.to_vec();
        for feature in 0..n_features {
            order.sort_by(|&a, &b| {
                self.rows[a as usize][feature]
                    .partial_cmp(&self.rows[b as usize][feature])
                    .unwrap()
            });
            // Prefix sums of targets and squared targets in value order.
            let mut sum = F::zero();
            let mut sq = F::zero();
            let mut prefix: Vec<(F, F)> = Vec::with_capacity(n);
            for &i in &order {
                let t = self.targets[i as usize];
                sum = sum + t;
                sq = sq + t * t;
                prefix.push((sum, sq));
            }
            let (total_sum, total_sq) = prefix[n - 1];
            for cut in self.min_leaf..=(n - self.min_leaf) {
                let v_left = self.rows[order[cut - 1] as usize][feature];
                let v_right = self.rows[order[cut] as usize][feature];
                if v_left == v_right {
                    continue;
                }
                let threshold = (v_left + v_right) / F::cast(2.0);
                let (ls, lq) = prefix[cut - 1];
                let (rs, rq) = (total_sum - ls, total_sq - lq);
                let nl = F::from_count(cut);
                let nr = F::from_count(n - cut);
                let sse_l = lq - ls * ls / nl;
                let sse_r = rq - rs * rs / nr;
                let reduction = parent_sse - sse_l - sse_r;
                if best.as_ref().map_or(true, |b| reduction > b.reduction) {
                    best = Some(BestSplit {
                        feature,
                        threshold,
                        reduction,
                    });
                }
            }
        }
        best.filter(|b| b.reduction > F::zero())
    }

    fn build(&mut self, idx: Vec<u32>, depth: usize) -> usize {
        let constant = idx
            .iter()
            .all(|&i| self.targets[i as usize] == self.targets[idx[0] as usize]);
        if depth >= self.max_depth || idx.len() < 2 * self.min_leaf || constant {
            return self.push_leaf(&idx);
        }
        let Some(split) = self.best_split(&idx) else {
            return self.push_leaf(&idx);
        };
        let (left_idx, right_idx): (Vec<u32>, Vec<u32>) = idx
            .iter()
            .partition(|&&i| self.rows[i as usize][split.feature] <= split.threshold);
        let at = self.nodes.len();
        // Placeholder; children indices are filled in after recursion.
        self.nodes.push(Node::Leaf {
            prediction: F::zero(),
            n_rows: 0,
        });
        let left = self.build(left_idx, depth + 1);
        let right = self.build(right_idx, depth + 1);
        self.nodes[at] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
            sse_reduction: split.reduction,
        };
        at
    }

    fn push_leaf(&mut self, idx: &[u32]) -> usize {
        let node = Node::Leaf {
            prediction: self.node_mean(idx),
            n_rows: idx.len(),
        };
        self.nodes.push(node);
        self.nodes.len() - 1
    }
}

/// Grow a regression tree. Tables too small to split (fewer than
/// 2·min_leaf rows) yield a single leaf rather than an error.
pub fn fit_tree_explainer<F: Float>(
    rows: &[Vec<F>],
    targets: &[F],
    max_depth: usize,
    min_leaf: usize,
) -> Result<TreeExplainer<F>> {
    if rows.len() != targets.len() {
        return Err(Error::invalid("row/target count mismatch"));
    }
    if rows.is_empty() {
        return Err(Error::invalid("tree explainer needs at least one row"));
    }
    let d = rows[0].len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(Error::invalid("inconsistent feature row width"));
    }
    if min_leaf == 0 {
        return Err(Error::invalid("min_leaf must be at least 1"));
    }
    let mut builder = Builder {
        rows,
        targets,
        max_depth,
        min_leaf,
        nodes: Vec::new(),
    };
    let all: Vec<u32> = (0..rows.len() as u32).collect();
    builder.build(all, 0);
    Ok(TreeExplainer {
        nodes: builder.nodes,
        n_features: d,
    })
}
