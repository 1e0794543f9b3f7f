use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Label;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub seed: u64,
    pub fold_of: Vec<usize>,
}

impl FoldAssignment {
    /// `(train, test)` row indices for fold `f`.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        let (test, train): (Vec<usize>, Vec<usize>) =
            (0..self.fold_of.len()).partition(|&i| self.fold_of[i] == f);
        (train, test)
    }
}

/// Shuffles each class with `seed` and deals it round-robin into `k` folds.
///
/// Dealing continues where the previous class stopped, so fold sizes stay
/// within one of each other overall as well as per class.
pub fn stratified_folds(y: &[Label], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be >= 2, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; y.len()];
    let mut next = 0;
    for class in [Label::Clean, Label::Noisy] {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        if members.len() < k {
            return Err(Error::TooFewInClass {
                class: class.as_u8(),
                count: members.len(),
                k,
            });
        }
        members.shuffle(&mut rng);
        for i in members {
            fold_of[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment { k, seed, fold_of })
}

/// Stratified folds over groups so all rows of one group share a fold.
///
/// A group counts as noisy when at least half its rows are noisy.
pub fn grouped_folds(groups: &[String], y: &[Label], k: usize, seed: u64) -> Result<FoldAssignment> {
    if groups.len() != y.len() {
        return Err(Error::LengthMismatch(groups.len(), y.len()));
    }
    let mut tally: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (g, l) in groups.iter().zip(y) {
        let e = tally.entry(g.as_str()).or_default();
        e.0 += 1;
        if *l == Label::Noisy {
            e.1 += 1;
        }
    }
    let names: Vec<&str> = tally.keys().copied().collect();
    let labels: Vec<Label> = tally
        .values()
        .map(|&(n, noisy)| if 2 * noisy >= n { Label::Noisy } else { Label::Clean })
        .collect();
    let group_folds = stratified_folds(&labels, k, seed)?;
    let fold_of = groups
        .iter()
        .map(|g| group_folds.fold_of[names.binary_search(&g.as_str()).unwrap_or(0)])
        .collect();
    Ok(FoldAssignment { k, seed, fold_of })
}
