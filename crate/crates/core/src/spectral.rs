//! Radix-2 FFT, periodogram and band power.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::BandDefinition;

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("empty signal")]
    EmptySignal,
    #[error("signal of {len} samples is shorter than the {min} required")]
    TooShort { len: usize, min: usize },
    #[error("band {lo_hz}..{hi_hz} Hz lies outside 0..{nyquist_hz} Hz")]
    BandOutsideSpectrum {
        lo_hz: f64,
        hi_hz: f64,
        nyquist_hz: f64,
    },
    #[error("invalid sampling rate {0}")]
    InvalidRate(f64),
}

/// DFT of a real signal, zero-padded to a power of two.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSpectrum {
    pub values: Vec<Complex64>,
    /// Length of the signal before padding.
    pub input_len: usize,
}

impl ComplexSpectrum {
    pub fn n_fft(&self) -> usize {
        self.values.len()
    }

    /// Frequency of bin `k` for a given sampling rate.
    pub fn frequency(&self, k: usize, sampling_rate_hz: f64) -> f64 {
        k as f64 * sampling_rate_hz / self.n_fft() as f64
    }
}

/// In-place iterative radix-2 transform. `data.len()` must be a power of two.
pub fn fft_in_place(data: &mut [Complex64]) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fft length {n} is not a power of two");
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        // twiddles computed directly per stage to keep rounding error flat
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = data[start + k];
                let b = data[start + k + half] * twiddles[k];
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

pub fn fft(signal: &[f64]) -> Result<ComplexSpectrum, SpectralError> {
    if signal.is_empty() {
        return Err(SpectralError::EmptySignal);
    }
    let n = signal.len().next_power_of_two();
    let mut values: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    values.resize(n, Complex64::new(0.0, 0.0));
    fft_in_place(&mut values);
    Ok(ComplexSpectrum {
        values,
        input_len: signal.len(),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Rectangular,
    Hann,
}

impl Window {
    fn weights(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann if n == 1 => vec![1.0],
            Window::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
                .collect(),
        }
    }
}

/// One-sided power spectral density (µV²/Hz).
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSpectrum {
    pub freqs_hz: Vec<f64>,
    pub power: Vec<f64>,
    pub n_fft: usize,
    pub sampling_rate_hz: f64,
}

impl PowerSpectrum {
    pub fn resolution_hz(&self) -> f64 {
        self.sampling_rate_hz / self.n_fft as f64
    }

    pub fn nyquist_hz(&self) -> f64 {
        self.sampling_rate_hz / 2.0
    }

    /// Index of the largest bin.
    pub fn peak_bin(&self) -> usize {
        self.power
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &p)| if p > best.1 { (i, p) } else { best })
            .0
    }
}

pub const MIN_SPECTRUM_LEN: usize = 16;

pub fn power_spectrum(signal: &[f64], sampling_rate_hz: f64) -> Result<PowerSpectrum, SpectralError> {
    power_spectrum_windowed(signal, sampling_rate_hz, Window::Rectangular)
}

/// Periodogram `|X_k|² / (fs · Σw²)`, doubled for `0 < k < N/2`.
///
/// Normalising by the window energy of the unpadded signal keeps densities
/// comparable whatever zero-padding the transform needed.
pub fn power_spectrum_windowed(
    signal: &[f64],
    sampling_rate_hz: f64,
    window: Window,
) -> Result<PowerSpectrum, SpectralError> {
    if !(sampling_rate_hz.is_finite() && sampling_rate_hz > 0.0) {
        return Err(SpectralError::InvalidRate(sampling_rate_hz));
    }
    if signal.len() < MIN_SPECTRUM_LEN {
        return Err(SpectralError::TooShort {
            len: signal.len(),
            min: MIN_SPECTRUM_LEN,
        });
    }
    let w = window.weights(signal.len());
    let energy: f64 = w.iter().map(|v| v * v).sum();
    let tapered: Vec<f64> = signal.iter().zip(&w).map(|(x, w)| x * w).collect();
    let spec = fft(&tapered)?;
    let n = spec.n_fft();
    let half = n / 2;
    let scale = 1.0 / (sampling_rate_hz * energy);
    let power = (0..=half)
        .map(|k| {
            let p = spec.values[k].norm_sqr() * scale;
            if k == 0 || k == half {
                p
            } else {
                2.0 * p
            }
        })
        .collect();
    let freqs_hz = (0..=half).map(|k| spec.frequency(k, sampling_rate_hz)).collect();
    Ok(PowerSpectrum {
        freqs_hz,
        power,
        n_fft: n,
        sampling_rate_hz,
    })
}

/// Mean of squared samples of a band-limited signal.
pub fn band_power_time(signal: &[f64]) -> Result<f64, SpectralError> {
    if signal.is_empty() {
        return Err(SpectralError::EmptySignal);
    }
    Ok(signal.iter().map(|x| x * x).sum::<f64>() / signal.len() as f64)
}

/// Trapezoidal integral of the density over `[lo, hi]`, with linear
/// interpolation at edges that fall between bins.
///
/// The DC and Nyquist bins are not doubled in the one-sided density, so
/// they enter the trapezoid at their folded (doubled) value; with that the
/// integral over `[0, Nyquist]` equals the signal's mean square exactly.
pub fn band_power_spectral(ps: &PowerSpectrum, band: &BandDefinition) -> Result<f64, SpectralError> {
    let nyq = ps.nyquist_hz();
    let (lo, hi) = (band.lo_hz, band.hi_hz);
    if !(lo >= 0.0 && hi <= nyq * (1.0 + 1e-12) && lo <= hi) {
        return Err(SpectralError::BandOutsideSpectrum {
            lo_hz: lo,
            hi_hz: hi,
            nyquist_hz: nyq,
        });
    }
    let hi = hi.min(nyq);
    let last = ps.power.len() - 1;
    let density = |k: usize| -> f64 {
        if k == 0 || k == last {
            2.0 * ps.power[k]
        } else {
            ps.power[k]
        }
    };
    let df = ps.resolution_hz();
    let at = |f: f64| -> f64 {
        let pos = (f / df).min(last as f64);
        let k = (pos.floor() as usize).min(last);
        if k == last {
            return density(last);
        }
        let t = pos - k as f64;
        density(k) * (1.0 - t) + density(k + 1) * t
    };
    let mut total = 0.0;
    let mut f_prev = lo;
    let mut p_prev = at(lo);
    let first_bin = (lo / df).floor() as usize + 1;
    for k in first_bin..=last {
        let f = k as f64 * df;
        if f >= hi {
            break;
        }
        let p = density(k);
        total += 0.5 * (p + p_prev) * (f - f_prev);
        f_prev = f;
        p_prev = p;
    }
    total += 0.5 * (at(hi) + p_prev) * (hi - f_prev);
    Ok(total)
}

pub const LOG_POWER_FLOOR: f64 = 1e-12;

/// `ln(max(p, 1e-12))`.
pub fn log_band_power(band_power: f64) -> f64 {
    band_power.max(LOG_POWER_FLOOR).ln()
}
