use serde::{Deserialize, Serialize};

use super::{check_rows, n_classes, ClassifierError};

/// Lazy k-nearest-neighbour classifier (Euclidean distance).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<usize>,
    pub n_classes: usize,
}

pub fn train_knn(x: &[Vec<f64>], y: &[usize], k: usize) -> Result<KnnModel, ClassifierError> {
    check_rows(x, y.len())?;
    if k == 0 || k > x.len() {
        return Err(ClassifierError::KTooLarge { k, n: x.len() });
    }
    Ok(KnnModel {
        k,
        x: x.to_vec(),
        y: y.to_vec(),
        n_classes: n_classes(y),
    })
}

impl KnnModel {
    pub fn n_features(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    /// Modal label among the k nearest. Equidistant candidates are ordered
    /// by class index, then row. A tie in the vote goes to the nearest
    /// neighbour's label if it is among the tied, otherwise the lowest class.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut dist: Vec<(f64, usize, usize)> = self
            .x
            .iter()
            .zip(&self.y)
            .enumerate()
            .map(|(row, (xi, &yi))| {
                let d2: f64 = xi.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, yi, row)
            })
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let nearest = &dist[..self.k];
        let mut votes = vec![0usize; self.n_classes];
        for &(_, c, _) in nearest {
            votes[c] += 1;
        }
        let top = *votes.iter().max().unwrap_or(&0);
        let tied: Vec<usize> = (0..self.n_classes).filter(|&c| votes[c] == top).collect();
        if tied.len() == 1 {
            return tied[0];
        }
        let first = nearest[0].1;
        if tied.contains(&first) {
            first
        } else {
            tied[0]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_of_three() {
        let x = vec![vec![0.0], vec![0.1], vec![0.2], vec![5.0]];
        let m = train_knn(&x, &[0, 0, 1, 1], 3).unwrap();
        assert_eq!(m.predict(&[0.05]), 0);
    }

    #[test]
    fn k_equals_n_predicts_majority() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let y = [1, 1, 1, 1, 1, 1, 0, 0, 0, 0];
        let m = train_knn(&x, &y, 10).unwrap();
        for q in [-5.0, 3.3, 8.9, 100.0] {
            assert_eq!(m.predict(&[q]), 1);
        }
    }

    #[test]
    fn duplicate_conflicting_points_go_to_lower_class() {
        let x = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let m = train_knn(&x, &[1, 0], 1).unwrap();
        assert_eq!(m.predict(&[1.0, 1.0]), 0);
    }

    #[test]
    fn even_k_tie_uses_nearest() {
        let x = vec![vec![0.0], vec![1.0], vec![3.0], vec![4.0]];
        let m = train_knn(&x, &[1, 0, 0, 1], 2).unwrap();
        assert_eq!(m.predict(&[0.2]), 1);
    }

    #[test]
    fn k_too_large() {
        assert!(matches!(
            train_knn(&[vec![0.0]], &[0], 2),
            Err(ClassifierError::KTooLarge { k: 2, n: 1 })
        ));
    }
}
