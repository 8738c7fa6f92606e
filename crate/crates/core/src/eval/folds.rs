use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;

/// Fold index of every row. All rows of one subject share a fold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub fold_of: Vec<usize>,
    pub k: usize,
    pub seed: u64,
}

impl FoldAssignment {
    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&r| self.fold_of[r] == fold).collect()
    }

    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&r| self.fold_of[r] != fold).collect()
    }

    /// Subjects per fold, sorted.
    pub fn subjects(&self, groups: &[String]) -> Vec<Vec<String>> {
        let mut out = vec![BTreeSet::new(); self.k];
        for (g, &f) in groups.iter().zip(&self.fold_of) {
            out[f].insert(g.clone());
        }
        out.into_iter().map(|s| s.into_iter().collect()).collect()
    }
}

/// Shuffle the sorted distinct subjects with a seeded generator and deal
/// them round-robin into `k` folds.
pub fn grouped_kfold(groups: &[String], k: usize, seed: u64) -> Result<FoldAssignment, EvalError> {
    if k < 2 {
        return Err(EvalError::InvalidFolds(k));
    }
    let mut subjects: Vec<&str> = groups.iter().map(String::as_str).collect::<BTreeSet<_>>().into_iter().collect();
    if subjects.len() < k {
        return Err(EvalError::TooFewSubjects {
            subjects: subjects.len(),
            folds: k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    subjects.shuffle(&mut rng);
    let fold_of_subject: BTreeMap<&str, usize> = subjects.iter().enumerate().map(|(i, &s)| (s, i % k)).collect();
    Ok(FoldAssignment {
        fold_of: groups.iter().map(|g| fold_of_subject[g.as_str()]).collect(),
        k,
        seed,
    })
}

/// Fails if any subject has rows on both sides of a split.
pub fn check_no_leakage(groups: &[String], train: &[usize], test: &[usize]) -> Result<(), EvalError> {
    let train_subjects: BTreeSet<&str> = train.iter().map(|&r| groups[r].as_str()).collect();
    if let Some(&r) = test.iter().find(|&&r| train_subjects.contains(groups[r].as_str())) {
        return Err(EvalError::Leakage(groups[r].clone()));
    }
    Ok(())
}
