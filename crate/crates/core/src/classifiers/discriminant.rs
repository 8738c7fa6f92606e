//! Gaussian discriminant analysis: pooled covariance (LDA) and per-class
//! covariance (QDA), both with trace-scaled ridge regularisation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{argmax, check_rows, n_classes, ClassifierError};

pub const DEFAULT_RIDGE: f64 = 1e-6;
const MAX_ESCALATIONS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub means: Vec<Vec<f64>>,
    pub cov_inv: Vec<Vec<f64>>,
    pub log_priors: Vec<f64>,
    /// `Σ⁻¹ μ_k` per class.
    pub weights: Vec<Vec<f64>>,
    /// `−½ μ_kᵀ Σ⁻¹ μ_k + log π_k` per class.
    pub offsets: Vec<f64>,
    pub ridge_lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QdaModel {
    pub means: Vec<Vec<f64>>,
    pub cov_inv: Vec<Vec<Vec<f64>>>,
    pub log_dets: Vec<f64>,
    pub log_priors: Vec<f64>,
    pub ridge_lambdas: Vec<f64>,
}

struct Regularized {
    inverse: DMatrix<f64>,
    log_det: f64,
    lambda: f64,
}

/// Add `λI` with `λ = ridge · trace(Σ)/d`, growing λ tenfold until the
/// Cholesky factorisation succeeds.
fn regularize(cov: &DMatrix<f64>, ridge: f64) -> Result<Regularized, ClassifierError> {
    let d = cov.nrows();
    let scale = cov.trace() / d as f64;
    let mut lambda = if scale > 0.0 { ridge * scale } else { ridge };
    for attempt in 0..=MAX_ESCALATIONS {
        let mut m = cov.clone();
        for i in 0..d {
            m[(i, i)] += lambda;
        }
        if let Some(chol) = m.cholesky() {
            let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
            if log_det.is_finite() {
                return Ok(Regularized {
                    inverse: chol.inverse(),
                    log_det,
                    lambda,
                });
            }
        }
        if attempt < MAX_ESCALATIONS {
            lambda = if lambda > 0.0 { lambda * 10.0 } else { 1e-12 };
        }
    }
    Err(ClassifierError::NotPositiveDefinite { lambda })
}

fn class_rows<'a>(x: &'a [Vec<f64>], y: &[usize], k: usize) -> Vec<Vec<&'a [f64]>> {
    let mut out = vec![Vec::new(); k];
    for (xi, &yi) in x.iter().zip(y) {
        out[yi].push(xi.as_slice());
    }
    out
}

fn mean_of(rows: &[&[f64]], d: usize) -> DVector<f64> {
    let mut m = DVector::zeros(d);
    for r in rows {
        for (j, v) in r.iter().enumerate() {
            m[j] += v;
        }
    }
    m / rows.len() as f64
}

fn scatter(rows: &[&[f64]], mean: &DVector<f64>, acc: &mut DMatrix<f64>) {
    let d = mean.len();
    for r in rows {
        let diff = DVector::from_iterator(d, r.iter().zip(mean.iter()).map(|(a, b)| a - b));
        acc.ger(1.0, &diff, &diff, 1.0);
    }
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn check_class_sizes(groups: &[Vec<&[f64]>]) -> Result<(), ClassifierError> {
    for (c, g) in groups.iter().enumerate() {
        if g.len() < 2 {
            return Err(ClassifierError::ClassTooSmall { class: c, n: g.len() });
        }
    }
    Ok(())
}

pub fn train_lda(x: &[Vec<f64>], y: &[usize], ridge: f64) -> Result<LdaModel, ClassifierError> {
    let d = check_rows(x, y.len())?;
    let k = n_classes(y);
    let groups = class_rows(x, y, k);
    check_class_sizes(&groups)?;
    let n = x.len();
    let means: Vec<DVector<f64>> = groups.iter().map(|g| mean_of(g, d)).collect();
    let mut pooled = DMatrix::zeros(d, d);
    for (g, m) in groups.iter().zip(&means) {
        scatter(g, m, &mut pooled);
    }
    let divisor = (n - k).max(1) as f64;
    pooled /= divisor;
    let reg = regularize(&pooled, ridge)?;
    let log_priors: Vec<f64> = groups.iter().map(|g| (g.len() as f64 / n as f64).ln()).collect();
    let weights: Vec<DVector<f64>> = means.iter().map(|m| &reg.inverse * m).collect();
    let offsets = means
        .iter()
        .zip(&weights)
        .zip(&log_priors)
        .map(|((m, w), lp)| -0.5 * m.dot(w) + lp)
        .collect();
    Ok(LdaModel {
        means: means.iter().map(|m| m.iter().copied().collect()).collect(),
        cov_inv: to_rows(&reg.inverse),
        log_priors,
        weights: weights.iter().map(|w| w.iter().copied().collect()).collect(),
        offsets,
        ridge_lambda: reg.lambda,
    })
}

impl LdaModel {
    pub fn n_features(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    /// `δ_k(x) = xᵀΣ⁻¹μ_k − ½ μ_kᵀΣ⁻¹μ_k + log π_k`.
    pub fn discriminants(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.offsets)
            .map(|(w, o)| w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + o)
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.discriminants(x))
    }
}

pub fn train_qda(x: &[Vec<f64>], y: &[usize], ridge: f64) -> Result<QdaModel, ClassifierError> {
    let d = check_rows(x, y.len())?;
    let k = n_classes(y);
    let groups = class_rows(x, y, k);
    check_class_sizes(&groups)?;
    let n = x.len();
    let mut model = QdaModel {
        means: Vec::with_capacity(k),
        cov_inv: Vec::with_capacity(k),
        log_dets: Vec::with_capacity(k),
        log_priors: Vec::with_capacity(k),
        ridge_lambdas: Vec::with_capacity(k),
    };
    for g in &groups {
        let m = mean_of(g, d);
        let mut cov = DMatrix::zeros(d, d);
        scatter(g, &m, &mut cov);
        cov /= (g.len() - 1) as f64;
        let reg = regularize(&cov, ridge)?;
        model.means.push(m.iter().copied().collect());
        model.cov_inv.push(to_rows(&reg.inverse));
        model.log_dets.push(reg.log_det);
        model.log_priors.push((g.len() as f64 / n as f64).ln());
        model.ridge_lambdas.push(reg.lambda);
    }
    Ok(model)
}

impl QdaModel {
    pub fn n_features(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    /// `δ_k(x) = −½ log|Σ_k| − ½ (x−μ_k)ᵀΣ_k⁻¹(x−μ_k) + log π_k`.
    pub fn discriminants(&self, x: &[f64]) -> Vec<f64> {
        (0..self.means.len())
            .map(|c| {
                let diff: Vec<f64> = x.iter().zip(&self.means[c]).map(|(a, b)| a - b).collect();
                let quad: f64 = self.cov_inv[c]
                    .iter()
                    .zip(&diff)
                    .map(|(row, di)| di * row.iter().zip(&diff).map(|(a, b)| a * b).sum::<f64>())
                    .sum();
                -0.5 * self.log_dets[c] - 0.5 * quad + self.log_priors[c]
            })
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.discriminants(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lda_symmetric_boundary() {
        // class means (−1,0) and (1,0), identity-like spread, equal priors
        let x = vec![
            vec![-2.0, 0.0],
            vec![0.0, 0.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, -1.0],
        ];
        let y = [0, 0, 0, 0, 1, 1, 1, 1];
        let m = train_lda(&x, &y, DEFAULT_RIDGE).unwrap();
        assert_eq!(m.predict(&[0.5, 0.0]), 1);
        assert_eq!(m.predict(&[-0.5, 0.0]), 0);
    }

    #[test]
    fn duplicate_column_survives_via_ridge() {
        let x: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                let v = (i as f64 * 0.9).sin();
                vec![v, v, (i as f64).cos()]
            })
            .collect();
        let y: Vec<usize> = (0..10).map(|i| i % 2).collect();
        let lda = train_lda(&x, &y, DEFAULT_RIDGE).unwrap();
        assert!(lda.ridge_lambda > 0.0);
        assert!(train_qda(&x, &y, DEFAULT_RIDGE).is_ok());
    }

    #[test]
    fn class_too_small() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0]];
        assert!(matches!(
            train_lda(&x, &[0, 0, 1], DEFAULT_RIDGE),
            Err(ClassifierError::ClassTooSmall { class: 1, n: 1 })
        ));
        assert!(matches!(
            train_qda(&x, &[0, 0, 1], DEFAULT_RIDGE),
            Err(ClassifierError::ClassTooSmall { .. })
        ));
    }
}
