use serde::{Deserialize, Serialize};

use super::ClassifierError;

/// SVM kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    Linear,
    /// `(u·v + coef0)^degree`
    Polynomial { degree: u32, coef0: f64 },
    /// `exp(−gamma ‖u − v‖²)`
    Rbf { gamma: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        match *self {
            KernelSpec::Polynomial { degree, coef0 } if degree == 0 || !coef0.is_finite() => {
                Err(ClassifierError::InvalidParameter(format!(
                    "polynomial kernel needs degree >= 1 and finite coef0 (got {degree}, {coef0})"
                )))
            }
            KernelSpec::Rbf { gamma } if !(gamma > 0.0 && gamma.is_finite()) => Err(
                ClassifierError::InvalidParameter(format!("rbf gamma must be positive (got {gamma})")),
            ),
            _ => Ok(()),
        }
    }

    /// Evaluate without a dimension check; callers guarantee equal lengths.
    #[inline]
    pub(crate) fn eval_unchecked(&self, u: &[f64], v: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(u, v),
            KernelSpec::Polynomial { degree, coef0 } => (dot(u, v) + coef0).powi(degree as i32),
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d2).exp()
            }
        }
    }

    /// Short human label, e.g. `Poly (E=2)`.
    pub fn describe(&self) -> String {
        match self {
            KernelSpec::Linear => "Linear".into(),
            KernelSpec::Polynomial { degree, .. } => format!("Poly (E={degree})"),
            KernelSpec::Rbf { gamma } => format!("RBF (gamma={gamma})"),
        }
    }
}

#[inline]
pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn kernel_eval(kernel: &KernelSpec, u: &[f64], v: &[f64]) -> Result<f64, ClassifierError> {
    if u.len() != v.len() {
        return Err(ClassifierError::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(kernel.eval_unchecked(u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_cases() {
        assert_eq!(kernel_eval(&KernelSpec::Linear, &[1.0, 1.0], &[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(kernel_eval(&KernelSpec::Rbf { gamma: 0.37 }, &[0.3, -2.0], &[0.3, -2.0]).unwrap(), 1.0);
        let poly = KernelSpec::Polynomial { degree: 2, coef0: 1.0 };
        assert_eq!(kernel_eval(&poly, &[1.0, 0.0], &[1.0, 0.0]).unwrap(), 4.0);
        assert!(matches!(
            kernel_eval(&KernelSpec::Linear, &[1.0], &[1.0, 2.0]),
            Err(ClassifierError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn invalid_kernels() {
        assert!(KernelSpec::Rbf { gamma: 0.0 }.validate().is_err());
        assert!(KernelSpec::Polynomial { degree: 0, coef0: 1.0 }.validate().is_err());
        assert!(KernelSpec::Linear.validate().is_ok());
    }
}
