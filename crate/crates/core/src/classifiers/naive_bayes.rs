use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{argmax, check_rows, n_classes, ClassifierError};

pub const DEFAULT_VAR_FLOOR: f64 = 1e-9;

/// Gaussian naive Bayes, evaluated in log space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
    pub priors: Vec<f64>,
    pub variance_floor: f64,
}

/// Fit per-class feature means and (population) variances. Variances are
/// floored at `max(var_floor, 1e-9 × largest column variance)`.
pub fn train_nb(x: &[Vec<f64>], y: &[usize], var_floor: f64) -> Result<NbModel, ClassifierError> {
    let d = check_rows(x, y.len())?;
    if !(var_floor > 0.0) {
        return Err(ClassifierError::InvalidParameter(format!(
            "variance floor must be positive (got {var_floor})"
        )));
    }
    let k = n_classes(y);
    let n = x.len() as f64;
    let mut counts = vec![0usize; k];
    let mut sums = vec![vec![0.0; d]; k];
    for (xi, &c) in x.iter().zip(y) {
        counts[c] += 1;
        for (s, v) in sums[c].iter_mut().zip(xi) {
            *s += v;
        }
    }
    if let Some(c) = counts.iter().position(|&n| n == 0) {
        return Err(ClassifierError::EmptyClass(c));
    }
    let means: Vec<Vec<f64>> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &n)| s.iter().map(|v| v / n as f64).collect())
        .collect();
    let mut variances = vec![vec![0.0; d]; k];
    for (xi, &c) in x.iter().zip(y) {
        for j in 0..d {
            let diff = xi[j] - means[c][j];
            variances[c][j] += diff * diff;
        }
    }
    for (v, &n) in variances.iter_mut().zip(&counts) {
        v.iter_mut().for_each(|s| *s /= n as f64);
    }

    let mut max_col_var: f64 = 0.0;
    for j in 0..d {
        let mu = x.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = x.iter().map(|r| (r[j] - mu) * (r[j] - mu)).sum::<f64>() / n;
        max_col_var = max_col_var.max(var);
    }
    let floor = var_floor.max(1e-9 * max_col_var);
    for v in variances.iter_mut().flatten() {
        *v = v.max(floor);
    }
    let priors = counts.iter().map(|&c| c as f64 / n).collect();
    Ok(NbModel {
        means,
        variances,
        priors,
        variance_floor: floor,
    })
}

impl NbModel {
    pub fn n_features(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    /// `log P(C=c) + Σ_i log p(x_i | C=c)` per class.
    pub fn log_posteriors(&self, x: &[f64]) -> Vec<f64> {
        (0..self.priors.len())
            .map(|c| {
                self.priors[c].ln()
                    + x.iter()
                        .zip(&self.means[c])
                        .zip(&self.variances[c])
                        .map(|((xi, mu), var)| log_normal_pdf(*xi, *mu, *var))
                        .sum::<f64>()
            })
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.log_posteriors(x))
    }
}

pub fn log_normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (2.0 * PI * var).ln() - (x - mean) * (x - mean) / (2.0 * var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_priors() {
        let x = vec![vec![0.0], vec![1.0], vec![4.0], vec![5.0]];
        let m = train_nb(&x, &[0, 0, 1, 1], DEFAULT_VAR_FLOOR).unwrap();
        assert_eq!(m.priors, [0.5, 0.5]);
        assert!((m.priors.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nearer_mean_wins_under_equal_variance() {
        let m = NbModel {
            means: vec![vec![0.0], vec![4.0]],
            variances: vec![vec![1.0], vec![1.0]],
            priors: vec![0.5, 0.5],
            variance_floor: 1e-9,
        };
        assert_eq!(m.predict(&[1.0]), 0);
    }

    #[test]
    fn single_point_per_class() {
        let x = vec![vec![0.0], vec![1.0]];
        let m = train_nb(&x, &[0, 1], DEFAULT_VAR_FLOOR).unwrap();
        assert!(m.variances.iter().flatten().all(|&v| v >= m.variance_floor));
        assert_eq!(m.predict(&[0.1]), 0);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn log_posterior_is_sum_of_logs() {
        let x = vec![vec![0.0, 2.0], vec![1.0, 3.0], vec![4.0, -1.0], vec![6.0, 0.0]];
        let m = train_nb(&x, &[0, 0, 1, 1], DEFAULT_VAR_FLOOR).unwrap();
        let q = [0.7, 1.1];
        let lp = m.log_posteriors(&q);
        for c in 0..2 {
            let mut expected = m.priors[c].ln();
            for j in 0..2 {
                let (mu, var) = (m.means[c][j], m.variances[c][j]);
                let density = (-(q[j] - mu).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
                expected += density.ln();
            }
            assert!((lp[c] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_class_rejected() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(matches!(
            train_nb(&x, &[0, 2], DEFAULT_VAR_FLOOR),
            Err(ClassifierError::EmptyClass(1))
        ));
    }
}
