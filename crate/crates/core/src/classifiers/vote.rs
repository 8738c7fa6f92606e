use super::{ClassifierError, ClassifierKind};

/// Modal label of a ballot. Among tied labels, the one backed by the
/// highest-priority voter wins (SVM > RF > NB > KNN > LDA > QDA > DT).
pub fn majority_vote(ballot: &[(ClassifierKind, usize)]) -> Result<usize, ClassifierError> {
    if ballot.is_empty() {
        return Err(ClassifierError::EmptyBallot);
    }
    let n_labels = ballot.iter().map(|&(_, l)| l).max().unwrap_or(0) + 1;
    let mut votes = vec![0usize; n_labels];
    for &(_, l) in ballot {
        votes[l] += 1;
    }
    let top = votes.iter().copied().max().unwrap_or(0);
    let winner = ballot
        .iter()
        .filter(|&&(_, l)| votes[l] == top)
        .min_by_key(|&&(kind, l)| (kind.priority(), l))
        .map(|&(_, l)| l);
    winner.ok_or(ClassifierError::EmptyBallot)
}
