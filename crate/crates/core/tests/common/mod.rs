//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use pdeeg::classifiers::{KernelSpec, SvmModel};
use pdeeg::dsp::BiquadCascade;

/// O(N²) DFT straight from the definition, returned as (re, im) pairs.
pub fn naive_dft(x: &[f64]) -> Vec<(f64, f64)> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (t, &v) in x.iter().enumerate() {
                // reduce k·t mod n first so the angle stays small
                let ang = -2.0 * PI * ((k * t) % n) as f64 / n as f64;
                re += v * ang.cos();
                im += v * ang.sin();
            }
            (re, im)
        })
        .collect()
}

/// |H(e^{jω})| of a cascade, evaluated from the raw coefficients with real
/// arithmetic only.
pub fn unit_circle_magnitude(filter: &BiquadCascade, freq_hz: f64, fs: f64) -> f64 {
    let w = TAU * freq_hz / fs;
    let (c1, s1, c2, s2) = (w.cos(), w.sin(), (2.0 * w).cos(), (2.0 * w).sin());
    filter
        .sections
        .iter()
        .map(|s| {
            let nr = s.b0 + s.b1 * c1 + s.b2 * c2;
            let ni = -(s.b1 * s1 + s.b2 * s2);
            let dr = 1.0 + s.a1 * c1 + s.a2 * c2;
            let di = -(s.a1 * s1 + s.a2 * s2);
            ((nr * nr + ni * ni) / (dr * dr + di * di)).sqrt()
        })
        .product()
}

pub fn tone(freq_hz: f64, fs: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (TAU * freq_hz * i as f64 / fs).sin()).collect()
}

/// RMS of the middle half, away from filter edge effects.
pub fn central_rms(x: &[f64]) -> f64 {
    let c = &x[x.len() / 4..3 * x.len() / 4];
    (c.iter().map(|v| v * v).sum::<f64>() / c.len() as f64).sqrt()
}

pub fn db(ratio: f64) -> f64 {
    20.0 * ratio.log10()
}

pub fn kernel(k: &KernelSpec, u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    match *k {
        KernelSpec::Linear => dot,
        KernelSpec::Polynomial { degree, coef0 } => (dot + coef0).powi(degree as i32),
        KernelSpec::Rbf { gamma } => {
            let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
            (-gamma * d2).exp()
        }
    }
}

/// Dense solution of the soft-margin SVM dual
/// `min ½αᵀQα − 1ᵀα, 0 ≤ α ≤ C, yᵀα = 0` by accelerated projected gradient.
pub struct QpSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
}

fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |lam: f64| -> Vec<f64> { v.iter().zip(y).map(|(vi, yi)| (vi - lam * yi).clamp(0.0, c)).collect() };
    let g = |lam: f64| -> f64 { at(lam).iter().zip(y).map(|(a, yi)| a * yi).sum() };
    let (mut lo, mut hi) = (-1.0, 1.0);
    while g(lo) < 0.0 {
        lo *= 2.0;
    }
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

pub fn dense_svm_qp(x: &[Vec<f64>], y: &[f64], k: &KernelSpec, c: f64) -> QpSolution {
    let n = x.len();
    let q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| y[i] * y[j] * kernel(k, &x[i], &x[j])).collect())
        .collect();
    let lip: f64 = q
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(1e-12);
    let grad = |a: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| q[i].iter().zip(a).map(|(qij, aj)| qij * aj).sum::<f64>() - 1.0)
            .collect()
    };
    let mut alpha = vec![0.0; n];
    let mut z = alpha.clone();
    let mut t = 1.0f64;
    for _ in 0..60_000 {
        let g = grad(&z);
        let step: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| zi - gi / lip).collect();
        let next = project(&step, y, c);
        let moved = next.iter().zip(&alpha).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if moved < 1e-14 * c {
            alpha = next;
            break;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = next
            .iter()
            .zip(&alpha)
            .map(|(a1, a0)| a1 + (t - 1.0) / t_next * (a1 - a0))
            .collect();
        alpha = next;
        t = t_next;
    }

    // bias from free vectors, else the middle of the feasible interval
    let f_no_b = |i: usize| -> f64 { (0..n).map(|j| alpha[j] * y[j] * kernel(k, &x[j], &x[i])).sum() };
    let eps = 1e-6 * c;
    let free: Vec<usize> = (0..n).filter(|&i| alpha[i] > eps && alpha[i] < c - eps).collect();
    let bias = if !free.is_empty() {
        free.iter().map(|&i| y[i] - f_no_b(i)).sum::<f64>() / free.len() as f64
    } else {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..n {
            let r = y[i] - f_no_b(i);
            let at_zero = alpha[i] <= eps;
            // y·f ≥ 1 at α = 0, y·f ≤ 1 at α = C
            if (y[i] > 0.0) == at_zero {
                lo = lo.max(r);
            } else {
                hi = hi.min(r);
            }
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo,
            (false, true) => hi,
            _ => 0.0,
        }
    };
    QpSolution { alpha, bias }
}

pub fn qp_decision(sol: &QpSolution, x: &[Vec<f64>], y: &[f64], k: &KernelSpec, point: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(&sol.alpha)
        .map(|((xi, yi), a)| a * yi * kernel(k, xi, point))
        .sum::<f64>()
        + sol.bias
}

/// α of every training row, recovered from the model's support vectors.
pub fn full_alphas(model: &SvmModel, x: &[Vec<f64>]) -> Vec<f64> {
    x.iter()
        .map(|xi| {
            model
                .support_vectors
                .iter()
                .position(|sv| sv == xi)
                .map_or(0.0, |p| model.alphas[p])
        })
        .collect()
}

/// Largest KKT violation of a trained model on its training set.
pub fn max_kkt_violation(model: &SvmModel, x: &[Vec<f64>], y: &[f64]) -> f64 {
    let c = model.c;
    let alphas = full_alphas(model, x);
    x.iter()
        .zip(y)
        .zip(&alphas)
        .map(|((xi, &yi), &a)| {
            let m = yi * model.decision_value(xi);
            if a <= 0.0 {
                (1.0 - m).max(0.0)
            } else if a >= c {
                (m - 1.0).max(0.0)
            } else {
                (m - 1.0).abs()
            }
        })
        .fold(0.0, f64::max)
}

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture_dir() -> PathBuf {
    crate_dir().join("fixtures/synthetic")
}

pub fn default_config_path() -> PathBuf {
    crate_dir().join("config/default.toml")
}

/// The shipped default config with its manifest pointed at `manifest` and
/// `extra` appended to the top-level keys.
pub fn write_config(dir: &Path, manifest: &Path, extra: &str) -> PathBuf {
    let text = std::fs::read_to_string(default_config_path()).unwrap();
    let text = text.replace(
        "manifest = \"../fixtures/synthetic/manifest.tsv\"",
        &format!("manifest = {:?}\n{extra}", manifest.display().to_string()),
    );
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path
}

/// Manifest over a subset of the shipped fixture files.
pub fn write_manifest(dir: &Path, rows: &[(&str, &str, &str, &str)]) -> PathBuf {
    let mut text = String::new();
    for (file, format, subject, cohort) in rows {
        let p = fixture_dir().join(file);
        text.push_str(&format!("{}\t{format}\t{subject}\t{cohort}\n", p.display()));
    }
    let path = dir.join("manifest.tsv");
    std::fs::write(&path, text).unwrap();
    path
}
