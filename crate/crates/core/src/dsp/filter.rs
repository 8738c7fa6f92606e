//! IIR filters as cascades of second-order sections.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DspError;
use crate::warning::Warning;

/// One second-order section, `a0` normalised to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    pub const IDENTITY: Biquad = Biquad {
        b0: 1.0,
        b1: 0.0,
        b2: 0.0,
        a1: 0.0,
        a2: 0.0,
    };

    /// Both poles strictly inside the unit circle.
    pub fn is_stable(&self) -> bool {
        self.a2.abs() < 1.0 && self.a1.abs() < 1.0 + self.a2
    }

    /// Largest pole magnitude.
    pub fn pole_radius(&self) -> f64 {
        let disc = self.a1 * self.a1 - 4.0 * self.a2;
        if disc < 0.0 {
            self.a2.sqrt()
        } else {
            let s = disc.sqrt();
            ((-self.a1 + s) / 2.0).abs().max(((-self.a1 - s) / 2.0).abs())
        }
    }

    pub fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        (self.b0 + self.b1 * z_inv + self.b2 * z2) / (1.0 + self.a1 * z_inv + self.a2 * z2)
    }

    fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }

    fn scaled(mut self, g: f64) -> Biquad {
        self.b0 *= g;
        self.b1 *= g;
        self.b2 *= g;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiquadCascade {
    pub sections: Vec<Biquad>,
    pub descriptor: String,
}

impl BiquadCascade {
    pub fn identity() -> Self {
        BiquadCascade {
            sections: vec![Biquad::IDENTITY],
            descriptor: "identity".into(),
        }
    }

    pub fn is_stable(&self) -> bool {
        self.sections.iter().all(Biquad::is_stable)
    }

    /// Complex frequency response at `freq_hz`.
    pub fn response(&self, freq_hz: f64, sampling_rate_hz: f64) -> Complex64 {
        let z_inv = Complex64::from_polar(1.0, -2.0 * PI * freq_hz / sampling_rate_hz);
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(z_inv))
    }

    pub fn magnitude(&self, freq_hz: f64, sampling_rate_hz: f64) -> f64 {
        self.response(freq_hz, sampling_rate_hz).norm()
    }

    /// Rough length, in samples, of the impulse-response transient: the sum
    /// of the per-section pole time constants. Used as the group-delay
    /// estimate when sizing edge padding.
    pub fn settle_len(&self) -> usize {
        self.sections
            .iter()
            .map(|s| {
                let r = s.pole_radius();
                if r <= 0.0 {
                    1
                } else {
                    (1.0 / (1.0 - r)).ceil().max(1.0) as usize
                }
            })
            .sum()
    }

    /// Single forward pass with the given per-section initial states.
    fn run(&self, x: &mut [f64], init_level: f64) {
        let mut level = init_level;
        for s in &self.sections {
            // steady state of the transposed direct form II for a constant input
            let y_ss = level * s.dc_gain();
            let mut s2 = s.b2 * level - s.a2 * y_ss;
            let mut s1 = s.b1 * level - s.a1 * y_ss + s2;
            for v in x.iter_mut() {
                let xin = *v;
                let y = s.b0 * xin + s1;
                s1 = s.b1 * xin - s.a1 * y + s2;
                s2 = s.b2 * xin - s.a2 * y;
                *v = y;
            }
            level = y_ss;
        }
    }

    /// Causal single-pass filtering from rest.
    pub fn apply_causal(&self, signal: &[f64]) -> Vec<f64> {
        let mut out = signal.to_vec();
        self.run(&mut out, 0.0);
        out
    }
}

/// Second-order IIR notch: unit gain at DC and Nyquist, zero at `center_hz`,
/// −3 dB width `center_hz / quality_q`.
pub fn design_notch(
    sampling_rate_hz: f64,
    center_hz: f64,
    quality_q: f64,
) -> Result<BiquadCascade, DspError> {
    if !(sampling_rate_hz > 0.0 && quality_q > 0.0 && center_hz > 0.0) {
        return Err(DspError::InvalidParameter(format!(
            "notch needs positive fs, f0 and Q (got {sampling_rate_hz}, {center_hz}, {quality_q})"
        )));
    }
    let nyquist = sampling_rate_hz / 2.0;
    if center_hz >= nyquist {
        return Err(DspError::CenterAboveNyquist {
            center_hz,
            nyquist_hz: nyquist,
        });
    }
    // -3 dB width of f0/Q measured on the digital frequency axis
    let w0 = 2.0 * PI * center_hz / sampling_rate_hz;
    let bw = w0 / quality_q;
    let g = 1.0 / (1.0 + (bw / 2.0).tan());
    let c = -2.0 * w0.cos();
    let section = Biquad {
        b0: g,
        b1: g * c,
        b2: g,
        a1: g * c,
        a2: 2.0 * g - 1.0,
    };
    Ok(BiquadCascade {
        sections: vec![section],
        descriptor: format!("notch f0={center_hz} Hz Q={quality_q} fs={sampling_rate_hz} Hz"),
    })
}

/// A band-pass design together with the edges actually used.
#[derive(Clone, Debug)]
pub struct BandpassDesign {
    pub filter: BiquadCascade,
    pub lo_hz: f64,
    pub hi_hz: f64,
    pub warnings: Vec<Warning>,
}

/// Highest usable band edge: 0.99 × Nyquist.
pub fn max_band_edge(sampling_rate_hz: f64) -> f64 {
    0.99 * sampling_rate_hz / 2.0
}

/// Clamp an upper band edge to [`max_band_edge`], reporting whether it moved.
pub fn clamp_band_edge(hi_hz: f64, sampling_rate_hz: f64) -> (f64, bool) {
    let limit = max_band_edge(sampling_rate_hz);
    if hi_hz > limit {
        (limit, true)
    } else {
        (hi_hz, false)
    }
}

/// Butterworth band-pass of total order `order` (`order / 2` biquads) via the
/// bilinear transform with pre-warping. `lo_hz == 0` gives a low-pass.
/// Upper edges above 0.99 × Nyquist are clamped with a warning.
pub fn design_bandpass(
    sampling_rate_hz: f64,
    lo_hz: f64,
    hi_hz: f64,
    order: usize,
) -> Result<BandpassDesign, DspError> {
    if !matches!(order, 2 | 4 | 6 | 8) {
        return Err(DspError::InvalidOrder(order));
    }
    if !(sampling_rate_hz > 0.0) || !lo_hz.is_finite() || !hi_hz.is_finite() {
        return Err(DspError::InvalidParameter(format!(
            "band-pass needs finite edges and positive fs (got {lo_hz}..{hi_hz} at {sampling_rate_hz})"
        )));
    }
    let mut warnings = Vec::new();
    let (hi, clamped) = clamp_band_edge(hi_hz, sampling_rate_hz);
    if clamped {
        warnings.push(Warning::new(
            "dsp",
            format!(
                "band edge {hi_hz} Hz exceeds 0.99 x Nyquist at {sampling_rate_hz} Hz; clamped to {hi} Hz"
            ),
        ));
    }
    if lo_hz < 0.0 || lo_hz >= hi {
        return Err(DspError::InvalidBandEdges { lo_hz, hi_hz: hi });
    }

    let fs2 = 2.0 * sampling_rate_hz;
    let warp = |f: f64| fs2 * (PI * f / sampling_rate_hz).tan();
    let w_hi = warp(hi);
    let bilinear = |s: Complex64| (fs2 + s) / (fs2 - s);

    let (analog_poles, numerator, ref_freq, n_proto) = if lo_hz == 0.0 {
        let n = order;
        let poles: Vec<Complex64> = butterworth_prototype(n).into_iter().map(|p| p * w_hi).collect();
        (poles, [1.0, 2.0, 1.0], 0.0, n)
    } else {
        let n = order / 2;
        let w_lo = warp(lo_hz);
        let w0_sq = w_lo * w_hi;
        let bw = w_hi - w_lo;
        let mut poles = Vec::with_capacity(order);
        for p in butterworth_prototype(n) {
            let pb = p * bw;
            let root = (pb * pb - 4.0 * w0_sq).sqrt();
            poles.push((pb + root) / 2.0);
            poles.push((pb - root) / 2.0);
        }
        let center = sampling_rate_hz / PI * (w0_sq.sqrt() / fs2).atan();
        (poles, [1.0, 0.0, -1.0], center, n)
    };

    let digital: Vec<Complex64> = analog_poles.into_iter().map(bilinear).collect();
    let sections = pair_poles(&digital)?
        .into_iter()
        .map(|(a1, a2)| {
            let s = Biquad {
                b0: numerator[0],
                b1: numerator[1],
                b2: numerator[2],
                a1,
                a2,
            };
            let z_inv = Complex64::from_polar(1.0, -2.0 * PI * ref_freq / sampling_rate_hz);
            s.scaled(1.0 / s.response(z_inv).norm())
        })
        .collect::<Vec<_>>();

    let filter = BiquadCascade {
        sections,
        descriptor: if lo_hz == 0.0 {
            format!("butterworth lowpass order {order} ({n_proto} poles) fc={hi} Hz fs={sampling_rate_hz} Hz")
        } else {
            format!("butterworth bandpass order {order} {lo_hz}-{hi} Hz fs={sampling_rate_hz} Hz")
        },
    };
    if !filter.is_stable() {
        return Err(DspError::Unstable(filter.descriptor));
    }
    Ok(BandpassDesign {
        filter,
        lo_hz,
        hi_hz: hi,
        warnings,
    })
}

/// Left-half-plane poles of the unit-cutoff analog Butterworth low-pass.
fn butterworth_prototype(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let theta = PI * (2 * k + n + 1) as f64 / (2 * n) as f64;
            Complex64::from_polar(1.0, theta)
        })
        .collect()
}

/// Group digital poles into real second-order denominators `(a1, a2)`:
/// conjugate pairs together, remaining real poles two at a time.
fn pair_poles(poles: &[Complex64]) -> Result<Vec<(f64, f64)>, DspError> {
    let eps = 1e-10;
    let mut out = Vec::new();
    let mut reals = Vec::new();
    for p in poles {
        if p.im > eps {
            out.push((-2.0 * p.re, p.norm_sqr()));
        } else if p.im.abs() <= eps {
            reals.push(p.re);
        }
    }
    if reals.len() % 2 != 0 {
        return Err(DspError::Unstable("odd number of real poles".into()));
    }
    reals.sort_by(|a, b| a.total_cmp(b));
    for pair in reals.chunks_exact(2) {
        out.push((-(pair[0] + pair[1]), pair[0] * pair[1]));
    }
    Ok(out)
}

/// Forward-backward filtering with odd-reflection edge padding.
///
/// Padding is 3 × [`BiquadCascade::settle_len`] samples per edge, capped at
/// `len - 1`. Each pass starts from the steady state of its first sample.
pub fn apply_zero_phase(filter: &BiquadCascade, signal: &[f64]) -> Result<Vec<f64>, DspError> {
    let n = signal.len();
    if n == 0 {
        return Err(DspError::EmptySignal);
    }
    let pad = (3 * filter.settle_len()).min(n - 1);
    let first = signal[0];
    let last = signal[n - 1];
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| 2.0 * first - signal[i]));
    ext.extend_from_slice(signal);
    ext.extend((1..=pad).map(|i| 2.0 * last - signal[n - 1 - i]));

    let x0 = ext[0];
    filter.run(&mut ext, x0);
    ext.reverse();
    let x0 = ext[0];
    filter.run(&mut ext, x0);
    ext.reverse();
    Ok(ext[pad..pad + n].to_vec())
}
