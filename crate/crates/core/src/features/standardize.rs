use serde::{Deserialize, Serialize};

use super::{FeatureError, FeatureMatrix};

pub const CONSTANT_COLUMN_EPS: f64 = 1e-12;

/// Column means and population standard deviations of a training matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub names: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub constant: Vec<bool>,
}

pub fn fit_standardization(matrix: &FeatureMatrix) -> StandardizationStats {
    let d = matrix.n_cols();
    let n = matrix.n_rows();
    let mut mean = vec![0.0; d];
    let mut std = vec![0.0; d];
    if n > 0 {
        for row in &matrix.data {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        for row in &matrix.data {
            for ((s, m), v) in std.iter_mut().zip(&mean).zip(row) {
                *s += (v - m) * (v - m);
            }
        }
        std.iter_mut().for_each(|s| *s = (*s / n as f64).sqrt());
    }
    let constant = std.iter().map(|&s| s < CONSTANT_COLUMN_EPS).collect();
    StandardizationStats {
        names: matrix.names.clone(),
        mean,
        std,
        constant,
    }
}

/// z-score every column; constant columns become 0.
pub fn apply_standardization(
    stats: &StandardizationStats,
    matrix: &FeatureMatrix,
) -> Result<FeatureMatrix, FeatureError> {
    if stats.names != matrix.names {
        return Err(FeatureError::ColumnMismatch(format!(
            "stats fitted on {} columns, matrix has {} with different names",
            stats.names.len(),
            matrix.names.len()
        )));
    }
    let mut out = matrix.clone();
    for row in &mut out.data {
        stats.transform_in_place(row);
    }
    Ok(out)
}

impl StandardizationStats {
    pub fn transform_in_place(&self, row: &mut [f64]) {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if self.constant[j] {
                0.0
            } else {
                (*v - self.mean[j]) / self.std[j]
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::CohortLabel;

    fn matrix(cols: &[&[f64]]) -> FeatureMatrix {
        let n = cols[0].len();
        FeatureMatrix {
            names: (0..cols.len()).map(|i| format!("c{i}")).collect(),
            data: (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect(),
            labels: vec![CohortLabel::HealthyControl; n],
            groups: (0..n).map(|r| format!("s{r}")).collect(),
        }
    }

    #[test]
    fn z_scores_use_population_sigma() {
        let m = matrix(&[&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]]);
        let stats = fit_standardization(&m);
        assert_eq!(stats.constant, [false, true]);
        let z = apply_standardization(&stats, &m).unwrap();
        let expected = 1.224744871391589;
        assert!((z.data[0][0] + expected).abs() < 1e-12);
        assert!(z.data[1][0].abs() < 1e-15);
        assert!((z.data[2][0] - expected).abs() < 1e-12);
        assert!(z.data.iter().all(|r| r[1] == 0.0));
    }

    #[test]
    fn foreign_columns_rejected() {
        let stats = fit_standardization(&matrix(&[&[1.0, 2.0]]));
        let mut other = matrix(&[&[1.0, 2.0]]);
        other.names[0] = "x".into();
        assert!(matches!(
            apply_standardization(&stats, &other),
            Err(FeatureError::ColumnMismatch(_))
        ));
    }
}
