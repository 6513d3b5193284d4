//! Softmax (multinomial) Logistic Regression trained by mini-batch gradient
//! descent on TF-IDF sparse vectors.

use crate::classifiers::{softmax3, Prediction};
use crate::corpus::Sentiment;
use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::rng::Rng;

/// Gradient-descent settings. Defaults: lr 0.1, 200 epochs, batch 64,
/// λ=1e-4, early stop when the full-data loss improves by less than 1e-6.
#[derive(Debug, Clone)]
pub struct LrConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub l2: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for LrConfig {
    fn default() -> LrConfig {
        LrConfig {
            lr: 0.1,
            epochs: 200,
            batch: 64,
            l2: 1e-4,
            tol: 1e-6,
            seed: 42,
        }
    }
}

/// Trained weights: `w` is class-major (`w[c*dim + t]`), biases unpenalized.
#[derive(Debug, Clone)]
pub struct LrModel {
    pub dim: usize,
    pub w: Vec<f64>,
    pub b: [f64; 3],
    pub l2: f64,
}

impl LrModel {
    pub fn zeros(dim: usize, l2: f64) -> LrModel {
        LrModel {
            dim,
            w: vec![0.0; 3 * dim],
            b: [0.0; 3],
            l2,
        }
    }

    fn logits(&self, x: &SparseVector) -> [f64; 3] {
        let mut z = self.b;
        for &(t, v) in &x.entries {
            for (c, zc) in z.iter_mut().enumerate() {
                *zc += self.w[c * self.dim + t] * v;
            }
        }
        z
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Prediction> {
        if x.dim != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: x.dim,
            });
        }
        Ok(Prediction::from_probs(softmax3(&self.logits(x))))
    }
}

/// Full-batch loss and gradient of mean softmax cross-entropy plus
/// (λ/2)·||W||², evaluated at (`w`, `b`). Shared by the trainer and by
/// finite-difference gradient checks.
pub fn loss_and_grad(
    w: &[f64],
    b: &[f64; 3],
    dim: usize,
    x: &[SparseVector],
    y: &[Sentiment],
    l2: f64,
) -> (f64, Vec<f64>, [f64; 3]) {
    let n = x.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; 3 * dim];
    let mut gb = [0.0; 3];
    for (v, &label) in x.iter().zip(y) {
        let mut z = *b;
        for &(t, val) in &v.entries {
            for (c, zc) in z.iter_mut().enumerate() {
                *zc += w[c * dim + t] * val;
            }
        }
        let probs = softmax3(&z);
        loss += -probs[label.index()].max(1e-12).ln();
        for c in 0..3 {
            let diff = probs[c] - if c == label.index() { 1.0 } else { 0.0 };
            gb[c] += diff / n;
            for &(t, val) in &v.entries {
                gw[c * dim + t] += diff * val / n;
            }
        }
    }
    loss /= n;
    let mut reg = 0.0;
    for (g, &wi) in gw.iter_mut().zip(w) {
        *g += l2 * wi;
        reg += wi * wi;
    }
    (loss + 0.5 * l2 * reg, gw, gb)
}

/// Mini-batch gradient descent from zero weights with seeded per-epoch
/// shuffling; stops early once the full-data loss stops improving by `tol`.
/// An empty training set or `epochs = 0` returns the zero model.
pub fn train_lr(x: &[SparseVector], y: &[Sentiment], cfg: &LrConfig) -> Result<LrModel> {
    assert!(cfg.lr > 0.0, "learning rate must be positive");
    assert!(cfg.batch > 0, "batch size must be positive");
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let dim = x.first().map_or(0, |v| v.dim);
    for v in x {
        if v.dim != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                got: v.dim,
            });
        }
    }

    let mut model = LrModel::zeros(dim, cfg.l2);
    if x.is_empty() || cfg.epochs == 0 {
        return Ok(model);
    }

    let mut rng = Rng::new(cfg.seed);
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut prev_loss = f64::INFINITY;

    for _ in 0..cfg.epochs {
        rng.shuffle(&mut order);
        for chunk in order.chunks(cfg.batch) {
            let m = chunk.len() as f64;
            let mut gw = vec![0.0; 3 * dim];
            let mut gb = [0.0; 3];
            for &i in chunk {
                let probs = softmax3(&model.logits(&x[i]));
                for c in 0..3 {
                    let diff = probs[c] - if c == y[i].index() { 1.0 } else { 0.0 };
                    gb[c] += diff / m;
                    for &(t, val) in &x[i].entries {
                        gw[c * dim + t] += diff * val / m;
                    }
                }
            }
            for (j, wj) in model.w.iter_mut().enumerate() {
                *wj -= cfg.lr * (gw[j] + cfg.l2 * *wj);
            }
            for c in 0..3 {
                model.b[c] -= cfg.lr * gb[c];
            }
        }

        let (loss, _, _) = loss_and_grad(&model.w, &model.b, dim, x, y, cfg.l2);
        if prev_loss - loss < cfg.tol {
            break;
        }
        prev_loss = loss;
    }
    Ok(model)
}
