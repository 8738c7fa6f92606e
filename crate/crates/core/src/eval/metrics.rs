use serde::{Deserialize, Serialize};

use super::EvalError;

/// `counts[true][pred]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn zeros(n_classes: usize) -> Self {
        ConfusionMatrix {
            counts: vec![vec![0; n_classes]; n_classes],
        }
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.n_classes()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.n_classes())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    /// Elementwise sum; the matrices must have the same class count.
    pub fn add(&mut self, other: &ConfusionMatrix) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }
}

pub fn confusion(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<ConfusionMatrix, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch {
            truth: y_true.len(),
            predicted: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(EvalError::EmptyMatrix);
    }
    let k = y_true.iter().chain(y_pred).max().map_or(0, |m| m + 1).max(n_classes);
    let mut cm = ConfusionMatrix::zeros(k);
    for (&t, &p) in y_true.iter().zip(y_pred) {
        cm.counts[t][p] += 1;
    }
    Ok(cm)
}

pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64, EvalError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    Ok(cm.trace() as f64 / total as f64)
}

/// `κ = (p_o − p_e) / (1 − p_e)`, defined as 0 when `p_e = 1`.
pub fn cohens_kappa(cm: &ConfusionMatrix) -> Result<f64, EvalError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let n = total as f64;
    let p_o = cm.trace() as f64 / n;
    let p_e = cm
        .row_sums()
        .iter()
        .zip(cm.col_sums())
        .map(|(&r, c)| r as f64 * c as f64)
        .sum::<f64>()
        / (n * n);
    if p_e >= 1.0 {
        return Ok(0.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}
