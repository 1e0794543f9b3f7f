use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{grow, Columns, DecisionTree, TreeConfig};
use crate::error::{Error, Result};
use crate::io::Label;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features examined per split; `None` means `floor(sqrt(d))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub min_samples_split: usize,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_features: None,
            bootstrap: true,
            min_samples_split: 2,
            max_depth: None,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidParameter("n_trees must be >= 1".into()));
        }
        self.tree_config(1, 0).validate()
    }

    fn tree_config(&self, d: usize, seed: u64) -> TreeConfig {
        TreeConfig {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            max_features: Some(self.max_features.unwrap_or(((d as f64).sqrt().floor() as usize).max(1))),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub n_features: usize,
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Mean of the per-tree noisy-class probabilities, summed in tree order.
    pub fn score(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.score(x)).sum::<f64>() / self.trees.len() as f64
    }
}

/// SplitMix64 finaliser; derives independent per-tree seeds.
pub fn mix_seed(seed: u64, i: u64) -> u64 {
    let mut z = seed ^ i.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Trains trees in parallel; each tree's randomness comes only from its
/// own derived seed, so the result does not depend on scheduling.
pub fn fit(x: &[Vec<f64>], y: &[Label], cfg: &ForestConfig) -> Result<RandomForest> {
    cfg.validate()?;
    let d = super::check_design(x, y)?;
    if !super::has_both_classes(y) {
        return Err(Error::SingleClass);
    }
    let data = Columns::new(x, y);
    let n = y.len();
    let trees = (0..cfg.n_trees)
        .into_par_iter()
        .map(|i| {
            let seed = mix_seed(cfg.seed, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let weights = if cfg.bootstrap {
                let mut w = vec![0u32; n];
                for _ in 0..n {
                    w[rng.random_range(0..n)] += 1;
                }
                w
            } else {
                vec![1u32; n]
            };
            let tree_seed: u64 = rng.random();
            grow(&data, &weights, &cfg.tree_config(d, tree_seed))
        })
        .collect();
    Ok(RandomForest { n_features: d, trees })
}
