//! Scalar statistics of one signal window.

use super::FeatureError;

fn non_empty(x: &[f64]) -> Result<(), FeatureError> {
    if x.is_empty() {
        Err(FeatureError::EmptySignal)
    } else {
        Ok(())
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sum_sq_dev(x: &[f64]) -> f64 {
    let mu = mean(x);
    x.iter().map(|v| (v - mu) * (v - mu)).sum()
}

/// Population standard deviation (divisor N).
pub fn std_dev(x: &[f64]) -> Result<f64, FeatureError> {
    non_empty(x)?;
    Ok((sum_sq_dev(x) / x.len() as f64).sqrt())
}

pub const ZERO_VARIANCE_EPS: f64 = 1e-12;

/// Non-excess kurtosis: fourth central moment over σ⁴, σ from [`std_dev`].
pub fn kurtosis(x: &[f64]) -> Result<f64, FeatureError> {
    let sigma = std_dev(x)?;
    if sigma <= ZERO_VARIANCE_EPS {
        return Err(FeatureError::ZeroVariance);
    }
    let mu = mean(x);
    let m4 = x.iter().map(|v| (v - mu).powi(4)).sum::<f64>() / x.len() as f64;
    Ok(m4 / sigma.powi(4))
}

/// Sample variance (divisor N − 1).
pub fn variance(x: &[f64]) -> Result<f64, FeatureError> {
    if x.len() < 2 {
        return Err(FeatureError::TooShort { len: x.len(), min: 2 });
    }
    Ok(sum_sq_dev(x) / (x.len() - 1) as f64)
}

pub fn l2_norm(x: &[f64]) -> Result<f64, FeatureError> {
    non_empty(x)?;
    Ok(x.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// Mean of squared samples.
pub fn average_energy(x: &[f64]) -> Result<f64, FeatureError> {
    non_empty(x)?;
    Ok(x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64)
}

pub fn rms(x: &[f64]) -> Result<f64, FeatureError> {
    Ok(average_energy(x)?.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn std_dev_cases() {
        assert_eq!(std_dev(&[1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(std_dev(&[1.0, -1.0, 1.0, -1.0]).unwrap(), 1.0);
        assert!((std_dev(&[1.0, 2.0, 3.0]).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(matches!(std_dev(&[]), Err(FeatureError::EmptySignal)));
    }

    #[test]
    fn kurtosis_cases() {
        assert!((kurtosis(&[1.0, -1.0, 1.0, -1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((kurtosis(&[-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap() - 1.7).abs() < 1e-12);
        assert!(matches!(kurtosis(&[5.0, 5.0, 5.0]), Err(FeatureError::ZeroVariance)));
    }

    #[test]
    fn variance_cases() {
        assert_eq!(variance(&[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(variance(&[4.0; 6]).unwrap(), 0.0);
        assert!(matches!(variance(&[1.0]), Err(FeatureError::TooShort { .. })));
    }

    #[test]
    fn energy_family() {
        assert_eq!(l2_norm(&[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(l2_norm(&[0.0; 4]).unwrap(), 0.0);
        assert_eq!(average_energy(&[3.0, 4.0]).unwrap(), 12.5);
        assert_eq!(average_energy(&[-0.5; 3]).unwrap(), 0.25);
        assert!((rms(&[3.0, 4.0]).unwrap() - 12.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(rms(&[-2.0, 2.0]).unwrap(), 2.0);
    }
}
