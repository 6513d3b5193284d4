//! From-scratch classical models over TF-IDF sparse vectors: multinomial
//! Naive Bayes, softmax Logistic Regression, and a Random Forest.
//!
//! Every `predict` returns a [`Prediction`]: a hard label plus a full
//! three-class probability vector summing to 1 ± 1e-9, with ties broken
//! toward the lowest class index.

pub mod lr;
pub mod nb;
pub mod rf;

pub use lr::{loss_and_grad, train_lr, LrConfig, LrModel};
pub use nb::{train_nb, NbModel};
pub use rf::{train_rf, RfConfig, RfModel};

use crate::corpus::Sentiment;

/// A classification outcome: argmax label plus the class distribution in
/// class-index order (negative, positive, neutral).
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: Sentiment,
    pub probs: [f64; 3],
}

impl Prediction {
    pub(crate) fn from_probs(probs: [f64; 3]) -> Prediction {
        Prediction {
            label: Sentiment::ALL[argmax3(&probs)],
            probs,
        }
    }
}

/// Index of the strictly greatest entry; ties go to the lowest index.
pub(crate) fn argmax3(v: &[f64; 3]) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

/// Numerically stable softmax over three scores. Scores of −∞ map to
/// probability exactly 0.
pub(crate) fn softmax3(scores: &[f64; 3]) -> [f64; 3] {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; 3];
    let mut sum = 0.0;
    for (o, s) in out.iter_mut().zip(scores) {
        *o = (s - max).exp();
        sum += *o;
    }
    for o in &mut out {
        *o /= sum;
    }
    out
}
