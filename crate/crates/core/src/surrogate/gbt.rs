use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::metrics::mse;
use super::{check_shape, Matrix};

/// Smallest number of samples a leaf may hold.
const MIN_LEAF: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    /// Shrinkage applied to every tree.
    pub learning_rate: f64,
    pub n_estimators: usize,
    pub max_depth: usize,
    /// L1 shrinkage of leaf sums; 0 gives plain mean-residual leaves.
    #[serde(default)]
    pub l1: f64,
}

impl GbtParams {
    pub fn new(learning_rate: f64, n_estimators: usize, max_depth: usize) -> Self {
        Self {
            learning_rate,
            n_estimators,
            max_depth,
            l1: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) || !(self.l1 >= 0.0) {
            return Err(Error::Domain(format!("invalid boosting parameters {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// Index of the child for `x[feature] < threshold`.
        left: usize,
        right: usize,
    },
}

/// Depth-limited least-squares regression tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<TreeNode>,
}

impl RegressionTree {
    /// Greedy variance-reduction tree over all features, thresholds at
    /// midpoints between sorted unique values.
    pub fn fit(x: &Matrix, target: &[f64], max_depth: usize, l1: f64) -> Self {
        let mut tree = Self { nodes: Vec::new() };
        let idx: Vec<usize> = (0..x.len()).collect();
        tree.grow(x, target, idx, max_depth, l1);
        tree
    }

    fn grow(&mut self, x: &Matrix, target: &[f64], idx: Vec<usize>, depth_left: usize, l1: f64) -> usize {
        let at = self.nodes.len();
        self.nodes.push(TreeNode::Leaf {
            value: leaf_value(target, &idx, l1),
        });
        if depth_left == 0 || idx.len() < 2 * MIN_LEAF {
            return at;
        }
        let Some((feature, threshold)) = best_split(x, target, &idx) else {
            return at;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| x[i][feature] < threshold);
        let left = self.grow(x, target, l, depth_left - 1, l1);
        let right = self.grow(x, target, r, depth_left - 1, l1);
        self.nodes[at] = TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        };
        at
    }

    pub fn predict_one(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[*feature] < *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], at: usize) -> usize {
            match &nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// True for a single leaf predicting exactly zero.
    pub fn is_degenerate(&self) -> bool {
        matches!(self.nodes.as_slice(), [TreeNode::Leaf { value }] if *value == 0.0)
    }
}

fn leaf_value(target: &[f64], idx: &[usize], l1: f64) -> f64 {
    if idx.is_empty() {
        return 0.0;
    }
    let sum: f64 = idx.iter().map(|&i| target[i]).sum();
    let shrunk = sum.signum() * (sum.abs() - l1).max(0.0);
    shrunk / idx.len() as f64
}

/// Split maximizing the reduction of squared error, first in
/// (feature, threshold) order on ties.
fn best_split(x: &Matrix, target: &[f64], idx: &[usize]) -> Option<(usize, f64)> {
    let n = idx.len();
    let total: f64 = idx.iter().map(|&i| target[i]).sum();
    let parent = total * total / n as f64;
    let sum_sq: f64 = idx.iter().map(|&i| target[i] * target[i]).sum();
    // Gains below round-off of the node's sum of squares are not real splits.
    let min_gain = 1e-12 * sum_sq;
    let width = x[idx[0]].len();

    let mut best: Option<(f64, usize, f64)> = None;
    let mut order = idx.to_vec();
    for feature in 0..width {
        order.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]));
        let mut left_sum = 0.0;
        for k in 0..n - 1 {
            left_sum += target[order[k]];
            let (lo, hi) = (x[order[k]][feature], x[order[k + 1]][feature]);
            let n_left = k + 1;
            if lo == hi || n_left < MIN_LEAF || n - n_left < MIN_LEAF {
                continue;
            }
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / n_left as f64 + right_sum * right_sum / (n - n_left) as f64 - parent;
            if gain > best.map_or(min_gain, |b| b.0) {
                best = Some((gain, feature, 0.5 * (lo + hi)));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

/// Squared-error gradient boosting of regression trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedTreeModel {
    pub params: GbtParams,
    /// Training-target mean.
    pub base_prediction: f64,
    pub trees: Vec<RegressionTree>,
    /// Training MSE after 0, 1, ..., `trees.len()` trees.
    pub train_mse: Vec<f64>,
}

impl BoostedTreeModel {
    pub fn fit(x: &Matrix, y: &[f64], params: GbtParams) -> Result<Self> {
        params.validate()?;
        check_shape(x, y)?;
        if x.len() < 2 {
            return Err(Error::Domain("boosting needs at least two samples".into()));
        }
        let base_prediction = y.iter().sum::<f64>() / y.len() as f64;
        let mut pred = vec![base_prediction; y.len()];
        let mut train_mse = vec![mse(y, &pred)];
        let mut trees = Vec::new();
        for _ in 0..params.n_estimators {
            let residual: Vec<f64> = y.iter().zip(&pred).map(|(t, p)| t - p).collect();
            let tree = RegressionTree::fit(x, &residual, params.max_depth, params.l1);
            if tree.is_degenerate() {
                // Residuals carry no structure; further rounds would repeat this tree.
                break;
            }
            for (p, row) in pred.iter_mut().zip(x) {
                *p += params.learning_rate * tree.predict_one(row);
            }
            train_mse.push(mse(y, &pred));
            trees.push(tree);
        }
        Ok(Self {
            params,
            base_prediction,
            trees,
            train_mse,
        })
    }

    pub fn predict_one(&self, x: &[f64]) -> f64 {
        self.trees
            .iter()
            .fold(self.base_prediction, |acc, t| acc + self.params.learning_rate * t.predict_one(x))
    }

    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        x.iter().map(|r| self.predict_one(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_targets() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let m = BoostedTreeModel::fit(&x, &[3.0; 10], GbtParams::new(0.1, 50, 2)).unwrap();
        assert!(m.trees.is_empty());
        assert!(m.predict(&x).iter().all(|&p| p == 3.0));
    }

    #[test]
    fn step_function_single_split() {
        let xs = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5];
        let x: Vec<Vec<f64>> = xs.iter().map(|&v| vec![v]).collect();
        let y: Vec<f64> = xs.iter().map(|&v| if v < 0.0 { 0.0 } else { 1.0 }).collect();
        let m = BoostedTreeModel::fit(&x, &y, GbtParams::new(1.0, 1, 1)).unwrap();
        assert_eq!(m.trees.len(), 1);
        match m.trees[0].nodes[0] {
            TreeNode::Split { feature, threshold, .. } => {
                assert_eq!(feature, 0);
                assert_eq!(threshold, -0.25);
            }
            _ => panic!("expected a split"),
        }
        assert_eq!(m.predict(&x), y);
        assert_eq!(*m.train_mse.last().unwrap(), 0.0);
    }

    /// One boosting round written out directly: exhaustive split search on
    /// residuals, recursive to `depth`.
    type Predictor = Box<dyn Fn(&[f64]) -> f64>;

    fn oracle_tree(x: &[Vec<f64>], r: &[f64], idx: &[usize], depth: usize) -> Predictor {
        let mean = idx.iter().map(|&i| r[i]).sum::<f64>() / idx.len() as f64;
        if depth == 0 || idx.len() < 4 {
            return Box::new(move |_| mean);
        }
        let sse = |s: &[usize]| {
            let m = s.iter().map(|&i| r[i]).sum::<f64>() / s.len() as f64;
            s.iter().map(|&i| (r[i] - m).powi(2)).sum::<f64>()
        };
        let parent = sse(idx);
        let mut best: Option<(f64, usize, f64)> = None;
        for f in 0..x[0].len() {
            let mut vals: Vec<f64> = idx.iter().map(|&i| x[i][f]).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            for w in vals.windows(2) {
                let t = 0.5 * (w[0] + w[1]);
                let l: Vec<usize> = idx.iter().copied().filter(|&i| x[i][f] < t).collect();
                let rr: Vec<usize> = idx.iter().copied().filter(|&i| x[i][f] >= t).collect();
                if l.len() < 2 || rr.len() < 2 {
                    continue;
                }
                let gain = parent - sse(&l) - sse(&rr);
                if gain > best.map_or(1e-9, |b| b.0) {
                    best = Some((gain, f, t));
                }
            }
        }
        match best {
            None => Box::new(move |_| mean),
            Some((_, f, t)) => {
                let l: Vec<usize> = idx.iter().copied().filter(|&i| x[i][f] < t).collect();
                let rr: Vec<usize> = idx.iter().copied().filter(|&i| x[i][f] >= t).collect();
                let lt = oracle_tree(x, r, &l, depth - 1);
                let rt = oracle_tree(x, r, &rr, depth - 1);
                Box::new(move |q| if q[f] < t { lt(q) } else { rt(q) })
            }
        }
    }

    #[test]
    fn matches_round_by_round_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let x: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] * r[1] + (3.0 * r[2]).sin()).collect();
        let m = BoostedTreeModel::fit(&x, &y, GbtParams::new(0.1, 50, 2)).unwrap();
        assert_eq!(m.trees.len(), 50);
        assert!(m.train_mse.windows(2).all(|w| w[1] <= w[0]));

        let mean = y.iter().sum::<f64>() / 20.0;
        let mut pred = vec![mean; 20];
        let idx: Vec<usize> = (0..20).collect();
        for _ in 0..50 {
            let r: Vec<f64> = y.iter().zip(&pred).map(|(a, b)| a - b).collect();
            let t = oracle_tree(&x, &r, &idx, 2);
            for (p, row) in pred.iter_mut().zip(&x) {
                *p += 0.1 * t(row);
            }
        }
        let oracle_mse = mse(&y, &pred);
        assert!((oracle_mse - m.train_mse[50]).abs() < 1e-10, "{oracle_mse} vs {}", m.train_mse[50]);
    }

    #[test]
    fn depth_and_count_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..5).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = x.iter().map(|r| r.iter().sum::<f64>().powi(2)).collect();
        for depth in 1..4 {
            let m = BoostedTreeModel::fit(&x, &y, GbtParams::new(0.2, 30, depth)).unwrap();
            assert!(m.trees.len() <= 30);
            assert!(m.trees.iter().all(|t| t.depth() <= depth));
        }
    }

    #[test]
    fn l1_shrinks_leaves() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..8).map(|i| if i < 4 { -1.0 } else { 1.0 }).collect();
        let plain = BoostedTreeModel::fit(&x, &y, GbtParams::new(1.0, 1, 1)).unwrap();
        let mut p = GbtParams::new(1.0, 1, 1);
        p.l1 = 2.0;
        let shrunk = BoostedTreeModel::fit(&x, &y, p).unwrap();
        assert_eq!(plain.predict_one(&[7.0]), 1.0);
        assert_eq!(shrunk.predict_one(&[7.0]), 0.5);
    }

    #[test]
    fn rejects_bad_params() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(BoostedTreeModel::fit(&x, &[0.0, 1.0], GbtParams::new(0.0, 1, 1)).is_err());
        assert!(BoostedTreeModel::fit(&x, &[0.0, 1.0], GbtParams::new(1.5, 1, 1)).is_err());
    }
}
