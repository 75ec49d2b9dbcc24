//! Cross-validation splits: seeded k-fold plans at sentence or note
//! granularity, and the 10% dev carve-out.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitGranularity {
    Sentence,
    Note,
}

impl std::fmt::Display for SplitGranularity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SplitGranularity::Sentence => f.write_str("sentence"),
            SplitGranularity::Note => f.write_str("note"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub granularity: SplitGranularity,
    /// Item index -> fold id.
    pub assignment: Vec<usize>,
}

impl FoldPlan {
    pub fn fold_indices(&self, fold: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f == fold).then_some(i))
            .collect()
    }

    pub fn rest_indices(&self, fold: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f != fold).then_some(i))
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Deal a seeded permutation round-robin into k folds: an exact partition
/// with fold sizes differing by at most one.
pub fn kfold_split(n_items: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Usage(format!("need at least 2 folds, got {k}")));
    }
    if n_items < k {
        return Err(Error::Data(format!(
            "cannot split {n_items} items into {k} folds"
        )));
    }
    let mut perm: Vec<usize> = (0..n_items).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignment = vec![0usize; n_items];
    for (deal, &item) in perm.iter().enumerate() {
        assignment[item] = deal % k;
    }
    Ok(FoldPlan {
        k,
        seed,
        granularity: SplitGranularity::Sentence,
        assignment,
    })
}

/// Note-level plan: whole notes are dealt into folds, so no note straddles
/// a train/test boundary. `note_of` maps each item to its note's dense id.
pub fn kfold_split_notes(note_of: &[usize], k: usize, seed: u64) -> Result<FoldPlan> {
    let n_notes = note_of.iter().copied().max().map_or(0, |m| m + 1);
    let note_plan = kfold_split(n_notes, k, seed)?;
    let assignment = note_of.iter().map(|&n| note_plan.assignment[n]).collect();
    Ok(FoldPlan {
        k,
        seed,
        granularity: SplitGranularity::Note,
        assignment,
    })
}

/// Carve a dev set out of training indices: |dev| = round(fraction * n)
/// with ties rounding to even, disjoint by construction.
pub fn dev_split(train: &[usize], fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..1.0).contains(&fraction) || fraction == 0.0 {
        return Err(Error::Usage(format!("dev fraction {fraction} outside (0, 1)")));
    }
    let n_dev = (fraction * train.len() as f64).round_ties_even() as usize;
    if n_dev >= train.len() {
        return Err(Error::Data(format!(
            "dev split of {n_dev} from {} items leaves no training data",
            train.len()
        )));
    }
    let mut perm = train.to_vec();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let dev = perm[..n_dev].to_vec();
    let train_rest = perm[n_dev..].to_vec();
    Ok((train_rest, dev))
}

/// Single shuffled train/dev/test split by fractions of the whole.
pub fn tri_split(
    n_items: usize,
    dev_fraction: f64,
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    if dev_fraction + test_fraction >= 1.0 {
        return Err(Error::Usage("dev + test fractions must leave training data".into()));
    }
    let mut perm: Vec<usize> = (0..n_items).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = (test_fraction * n_items as f64).round_ties_even() as usize;
    let n_dev = (dev_fraction * n_items as f64).round_ties_even() as usize;
    let test = perm[..n_test].to_vec();
    let dev = perm[n_test..n_test + n_dev].to_vec();
    let train = perm[n_test + n_dev..].to_vec();
    if train.is_empty() {
        return Err(Error::Data("empty training split".into()));
    }
    Ok((train, dev, test))
}
