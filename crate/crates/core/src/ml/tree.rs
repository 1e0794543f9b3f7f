//! CART classification trees with Gini impurity and integer sample weights.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Label;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features examined per split; `None` means all of them.
    pub max_features: Option<usize>,
    pub seed: u64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_split: 2,
            max_features: None,
            seed: 0,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(Error::InvalidParameter("min_samples_split must be >= 2".into()));
        }
        if self.max_features == Some(0) {
            return Err(Error::InvalidParameter("max_features must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    /// `p` is the weighted fraction of noisy samples that reached the leaf.
    Leaf { p: f64 },
    /// Samples with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub n_features: usize,
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn score(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { p } => return p,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &DecisionTree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::InvalidParameter("tree has no nodes".into()));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let Node::Split { feature, left, right, .. } = *n {
                if feature >= self.n_features || left <= i || right <= i || left >= self.nodes.len() || right >= self.nodes.len() {
                    return Err(Error::InvalidParameter(format!("malformed tree node {i}")));
                }
            }
        }
        Ok(())
    }
}

/// Candidate split. Impurity is kept as an exact rational `num / den`
/// proportional to the weighted Gini of the two children, so ties are
/// detected exactly and broken by feature index, then threshold.
#[derive(Clone, Copy)]
struct Candidate {
    num: u128,
    den: u128,
    feature: usize,
    threshold: f64,
}

impl Candidate {
    fn better_than(&self, o: &Candidate) -> bool {
        let a = self.num * o.den;
        let b = o.num * self.den;
        a < b || (a == b && (self.feature, self.threshold) < (o.feature, o.threshold))
    }
}

/// Sum over children of `c0 * c1 / (c0 + c1)`, which is half the
/// count-weighted Gini impurity.
fn children_impurity(l0: u64, l1: u64, r0: u64, r1: u64) -> (u128, u128) {
    let (l0, l1, r0, r1) = (l0 as u128, l1 as u128, r0 as u128, r1 as u128);
    let nl = l0 + l1;
    let nr = r0 + r1;
    (l0 * l1 * nr + r0 * r1 * nl, nl * nr)
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a / 2.0 + b / 2.0;
    if m >= b || m < a {
        a
    } else {
        m
    }
}

pub(crate) struct Columns {
    cols: Vec<Vec<f64>>,
    y: Vec<u8>,
}

impl Columns {
    pub(crate) fn new(x: &[Vec<f64>], y: &[Label]) -> Self {
        let d = x.first().map_or(0, Vec::len);
        Self {
            cols: (0..d).map(|j| x.iter().map(|r| r[j]).collect()).collect(),
            y: y.iter().map(|l| l.as_u8()).collect(),
        }
    }

    pub(crate) fn n_features(&self) -> usize {
        self.cols.len()
    }
}

/// Grows one tree on rows with non-zero weight.
pub(crate) fn grow(data: &Columns, weights: &[u32], cfg: &TreeConfig) -> DecisionTree {
    let d = data.n_features();
    let max_features = cfg.max_features.unwrap_or(d).min(d);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let root: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0).collect();

    let mut nodes = vec![Node::Leaf { p: 0.0 }];
    let mut stack = vec![(0usize, root, 0usize)];
    let mut feats: Vec<usize> = (0..d).collect();
    while let Some((id, rows, depth)) = stack.pop() {
        let (mut c0, mut c1) = (0u64, 0u64);
        for &i in &rows {
            if data.y[i] == 1 {
                c1 += weights[i] as u64;
            } else {
                c0 += weights[i] as u64;
            }
        }
        let leaf = Node::Leaf { p: c1 as f64 / (c0 + c1) as f64 };
        let stop = c0 == 0
            || c1 == 0
            || ((c0 + c1) as usize) < cfg.min_samples_split
            || cfg.max_depth.is_some_and(|m| depth >= m);
        if stop {
            nodes[id] = leaf;
            continue;
        }

        feats.shuffle(&mut rng);
        let mut best: Option<Candidate> = None;
        let mut tried = 0;
        let mut order = rows.clone();
        for &f in &feats {
            if tried == max_features {
                break;
            }
            let col = &data.cols[f];
            order.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
            if col[order[0]] == col[order[order.len() - 1]] {
                continue;
            }
            tried += 1;
            let (mut l0, mut l1) = (0u64, 0u64);
            for w in 0..order.len() - 1 {
                let i = order[w];
                if data.y[i] == 1 {
                    l1 += weights[i] as u64;
                } else {
                    l0 += weights[i] as u64;
                }
                let (a, b) = (col[i], col[order[w + 1]]);
                if a == b {
                    continue;
                }
                let (num, den) = children_impurity(l0, l1, c0 - l0, c1 - l1);
                let cand = Candidate { num, den, feature: f, threshold: midpoint(a, b) };
                if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                    best = Some(cand);
                }
            }
        }

        match best {
            None => nodes[id] = leaf,
            Some(s) => {
                let col = &data.cols[s.feature];
                let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| col[i] <= s.threshold);
                let left = nodes.len();
                let right = left + 1;
                nodes.push(Node::Leaf { p: 0.0 });
                nodes.push(Node::Leaf { p: 0.0 });
                nodes[id] = Node::Split { feature: s.feature, threshold: s.threshold, left, right };
                stack.push((right, r, depth + 1));
                stack.push((left, l, depth + 1));
            }
        }
    }
    DecisionTree { n_features: d, nodes }
}

/// Fits a single tree. A single-class training set yields one pure leaf.
pub fn fit(x: &[Vec<f64>], y: &[Label], cfg: &TreeConfig) -> Result<DecisionTree> {
    cfg.validate()?;
    super::check_design(x, y)?;
    let data = Columns::new(x, y);
    Ok(grow(&data, &vec![1; y.len()], cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Clean as A, Noisy as B};

    #[test]
    fn threshold_between_classes() {
        let x: Vec<Vec<f64>> = [0.0, 1.0, 2.0, 3.0].iter().map(|&v| vec![v]).collect();
        let t = fit(&x, &[A, A, B, B], &TreeConfig::default()).unwrap();
        match t.nodes[0] {
            Node::Split { threshold, .. } => assert_eq!(threshold, 1.5),
            _ => panic!("expected split"),
        }
        assert_eq!(t.depth(), 1);
    }

    #[test]
    fn pure_node_is_leaf() {
        let x = vec![vec![1.0], vec![2.0]];
        let t = fit(&x, &[B, B], &TreeConfig::default()).unwrap();
        assert_eq!(t.nodes, vec![Node::Leaf { p: 1.0 }]);
    }

    #[test]
    fn axis_aligned_quadrants() {
        // noisy iff x0 > 0 and x1 > 0: needs two levels
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                let (a, b) = (i as f64 - 3.5, j as f64 - 3.5);
                x.push(vec![a, b]);
                y.push(if a > 0.0 && b > 0.0 { B } else { A });
            }
        }
        let t = fit(&x, &y, &TreeConfig::default()).unwrap();
        assert!(t.depth() <= 2);
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(t.score(xi) > 0.5, *yi == B);
        }
    }

    #[test]
    fn identical_points_mixed_labels_stay_leaf() {
        let x = vec![vec![1.0], vec![1.0], vec![1.0]];
        let t = fit(&x, &[A, B, B], &TreeConfig::default()).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert!((t.score(&[1.0]) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn max_depth_respected() {
        let x: Vec<Vec<f64>> = (0..32).map(|i| vec![i as f64]).collect();
        let y: Vec<Label> = (0..32).map(|i| if i % 2 == 0 { A } else { B }).collect();
        let t = fit(&x, &y, &TreeConfig { max_depth: Some(3), ..Default::default() }).unwrap();
        assert!(t.depth() <= 3);
    }
}
