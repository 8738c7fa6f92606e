//! Soft-margin SVM trained by sequential minimal optimisation.
//!
//! The dual problem
//!
//! ```text
//! min_α  ½ αᵀQα − eᵀα    s.t.  yᵀα = 0,  0 ≤ α_t ≤ C,   Q_ts = y_t y_s K(x_t, x_s)
//! ```
//!
//! is solved two variables at a time. Each step takes the maximal violating
//! pair: `i = argmax_{t ∈ I_up} −y_t G_t`, `j = argmin_{t ∈ I_low} −y_t G_t`,
//! where `G = Qα − e`. The loop stops once `m − M < tol`; any bias in
//! `[M, m]` then satisfies every KKT condition to within `tol` in
//! `y·f(x)` units.

use std::collections::VecDeque;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use super::{check_rows, ClassifierError};

const TAU: f64 = 1e-12;
pub const PRUNE_ALPHA: f64 = 1e-8;
pub const DEFAULT_MAX_PASSES: usize = 10_000;
const CACHE_ENTRIES: usize = 32_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: KernelSpec,
    pub c: f64,
    pub support_vectors: Vec<Vec<f64>>,
    /// ±1 label of each support vector.
    pub labels: Vec<f64>,
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub n_sv: usize,
    /// Class index mapped to −1 and to +1.
    pub classes: [usize; 2],
    pub converged: bool,
    pub iterations: usize,
}

impl SvmModel {
    pub fn n_features(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    /// `Σ y_i α_i K(x_i, x) + b`.
    pub fn decision_value(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(self.labels.iter().zip(&self.alphas))
            .map(|(sv, (y, a))| y * a * self.kernel.eval_unchecked(sv, x))
            .sum::<f64>()
            + self.bias
    }

    /// Sign of the decision value; 0 maps to +1.
    pub fn predict_sign(&self, x: &[f64]) -> f64 {
        if self.decision_value(x) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn predict_class(&self, x: &[f64]) -> usize {
        if self.predict_sign(x) > 0.0 {
            self.classes[1]
        } else {
            self.classes[0]
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub kernel: KernelSpec,
    pub c: f64,
    pub tol: f64,
    /// Iteration cap, in multiples of the training-set size.
    pub max_passes: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            kernel: KernelSpec::Linear,
            c: 1.0,
            tol: 1e-3,
            max_passes: DEFAULT_MAX_PASSES,
        }
    }
}

/// Kernel rows `K(x_i, ·)` kept in a bounded LRU cache.
struct KernelCache<'a> {
    x: &'a [Vec<f64>],
    kernel: KernelSpec,
    rows: Vec<Option<Rc<[f64]>>>,
    order: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelCache<'a> {
    fn new(x: &'a [Vec<f64>], kernel: KernelSpec) -> Self {
        let n = x.len();
        KernelCache {
            x,
            kernel,
            rows: vec![None; n],
            order: VecDeque::new(),
            capacity: (CACHE_ENTRIES / n.max(1)).clamp(2, n.max(2)),
        }
    }

    fn row(&mut self, i: usize) -> Rc<[f64]> {
        if let Some(r) = &self.rows[i] {
            return Rc::clone(r);
        }
        if self.order.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.rows[old] = None;
            }
        }
        let xi = &self.x[i];
        let r: Rc<[f64]> = self
            .x
            .iter()
            .map(|xt| self.kernel.eval_unchecked(xi, xt))
            .collect();
        self.rows[i] = Some(Rc::clone(&r));
        self.order.push_back(i);
        r
    }
}

fn in_up(alpha: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && alpha < c) || (y < 0.0 && alpha > 0.0)
}

fn in_low(alpha: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && alpha > 0.0) || (y < 0.0 && alpha < c)
}

/// Train on ±1 targets.
pub fn train_svm(x: &[Vec<f64>], y: &[f64], params: &SvmParams) -> Result<SvmModel, ClassifierError> {
    let d = check_rows(x, y.len())?;
    params.kernel.validate()?;
    if !(params.c > 0.0 && params.c.is_finite()) || !(params.tol > 0.0) {
        return Err(ClassifierError::InvalidParameter(format!(
            "svm needs positive C and tol (got {}, {})",
            params.c, params.tol
        )));
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(ClassifierError::InvalidParameter("svm targets must be ±1".into()));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(ClassifierError::SingleClass);
    }
    let n = x.len();
    let c = params.c;
    let diag: Vec<f64> = x.iter().map(|xi| params.kernel.eval_unchecked(xi, xi)).collect();
    let mut cache = KernelCache::new(x, params.kernel);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let max_iter = params.max_passes.saturating_mul(n.max(1));
    let mut iterations = 0usize;
    let mut converged = false;

    loop {
        let (mut i, mut m_up) = (usize::MAX, f64::NEG_INFINITY);
        let (mut j, mut m_low) = (usize::MAX, f64::INFINITY);
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t], c) && v > m_up {
                i = t;
                m_up = v;
            }
            if in_low(alpha[t], y[t], c) && v < m_low {
                j = t;
                m_low = v;
            }
        }
        if i == usize::MAX || j == usize::MAX || m_up - m_low < params.tol {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            break;
        }
        iterations += 1;

        let ki = cache.row(i);
        let kj = cache.row(j);
        let (yi, yj) = (y[i], y[j]);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let kij = ki[j];
        if yi != yj {
            let quad = (diag[i] + diag[j] - 2.0 * kij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (diag[i] + diag[j] - 2.0 * kij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (yi * ki[t] * di + yj * kj[t] * dj);
        }
    }

    // bias: mean of −y G over free vectors, kept inside [M, m]
    let (mut up, mut low) = (f64::NEG_INFINITY, f64::INFINITY);
    let (mut free_sum, mut free_n) = (0.0, 0usize);
    for t in 0..n {
        let v = -y[t] * grad[t];
        if in_up(alpha[t], y[t], c) {
            up = up.max(v);
        }
        if in_low(alpha[t], y[t], c) {
            low = low.min(v);
        }
        if alpha[t] > 0.0 && alpha[t] < c {
            free_sum += v;
            free_n += 1;
        }
    }
    let (lo_b, hi_b) = (low.min(up), low.max(up));
    let mut bias = if free_n > 0 {
        free_sum / free_n as f64
    } else {
        0.5 * (up + low)
    };
    if lo_b.is_finite() && hi_b.is_finite() {
        bias = bias.clamp(lo_b, hi_b);
    } else if !bias.is_finite() {
        bias = if up.is_finite() { up } else { low };
    }

    let keep: Vec<usize> = (0..n).filter(|&t| alpha[t] > PRUNE_ALPHA).collect();
    debug_assert!(keep.iter().all(|&t| x[t].len() == d));
    Ok(SvmModel {
        kernel: params.kernel,
        c,
        support_vectors: keep.iter().map(|&t| x[t].clone()).collect(),
        labels: keep.iter().map(|&t| y[t]).collect(),
        alphas: keep.iter().map(|&t| alpha[t]).collect(),
        bias,
        n_sv: keep.len(),
        classes: [0, 1],
        converged,
        iterations,
    })
}

/// Train on binary class indices: the lower index maps to −1.
pub fn train_svm_classes(
    x: &[Vec<f64>],
    y: &[usize],
    params: &SvmParams,
) -> Result<SvmModel, ClassifierError> {
    let mut classes: Vec<usize> = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    match classes.len() {
        0 => return Err(ClassifierError::EmptyTrainingSet),
        1 => return Err(ClassifierError::SingleClass),
        2 => {}
        k => {
            return Err(ClassifierError::InvalidParameter(format!(
                "svm is binary; got {k} classes"
            )))
        }
    }
    let targets: Vec<f64> = y.iter().map(|&c| if c == classes[1] { 1.0 } else { -1.0 }).collect();
    let mut model = train_svm(x, &targets, params)?;
    model.classes = [classes[0], classes[1]];
    Ok(model)
}
