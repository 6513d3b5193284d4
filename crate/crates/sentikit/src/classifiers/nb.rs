//! Multinomial Naive Bayes over TF-IDF weights (fractional counts) with
//! Laplace smoothing.

use crate::classifiers::Prediction;
use crate::corpus::Sentiment;
use crate::error::{Error, Result};
use crate::features::SparseVector;

/// Trained Naive Bayes model. Likelihoods are stored per term per class in
/// log space; classes absent from training keep a −∞ log prior, which
/// predicts probability exactly 0 for them.
#[derive(Debug, Clone)]
pub struct NbModel {
    pub dim: usize,
    pub alpha: f64,
    pub log_prior: [f64; 3],
    /// `log_likelihood[t]` holds ln P(t|c) for each class; indexed by
    /// feature id over the full dimension (reserved ids included, so the
    /// per-class likelihoods sum to 1 over the whole id space).
    pub log_likelihood: Vec<[f64; 3]>,
}

/// Trains on TF-IDF vectors: priors are class frequencies, likelihoods are
/// (Σ weights of t in c + α)/(Σ all weights in c + α·dim). Negative weights
/// (possible under the alternate idf form) contribute nothing.
pub fn train_nb(x: &[SparseVector], y: &[Sentiment], alpha: f64) -> Result<NbModel> {
    assert!(alpha > 0.0, "smoothing alpha must be positive");
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::MissingClass(Sentiment::Negative.name()));
    }
    let dim = x[0].dim;
    for v in x {
        if v.dim != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                got: v.dim,
            });
        }
    }

    let mut class_counts = [0usize; 3];
    let mut term_weight = vec![[0.0f64; 3]; dim];
    let mut class_weight = [0.0f64; 3];
    for (v, &label) in x.iter().zip(y) {
        let c = label.index();
        class_counts[c] += 1;
        for &(t, w) in &v.entries {
            let w = w.max(0.0);
            term_weight[t][c] += w;
            class_weight[c] += w;
        }
    }

    let n = x.len() as f64;
    let mut log_prior = [f64::NEG_INFINITY; 3];
    for c in 0..3 {
        if class_counts[c] > 0 {
            log_prior[c] = (class_counts[c] as f64 / n).ln();
        }
    }

    let mut log_likelihood = vec![[0.0f64; 3]; dim];
    for c in 0..3 {
        let denom = class_weight[c] + alpha * dim as f64;
        for t in 0..dim {
            log_likelihood[t][c] = ((term_weight[t][c] + alpha) / denom).ln();
        }
    }

    Ok(NbModel {
        dim,
        alpha,
        log_prior,
        log_likelihood,
    })
}

impl NbModel {
    /// Posterior over classes for one document vector.
    pub fn predict(&self, x: &SparseVector) -> Result<Prediction> {
        if x.dim != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: x.dim,
            });
        }
        let mut score = self.log_prior;
        for &(t, w) in &x.entries {
            for c in 0..3 {
                if score[c].is_finite() {
                    score[c] += w * self.log_likelihood[t][c];
                }
            }
        }
        // Normalize in log space; −∞ scores become exactly 0.
        let max = score.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut probs = [0.0; 3];
        let mut sum = 0.0;
        for c in 0..3 {
            probs[c] = if score[c].is_finite() {
                (score[c] - max).exp()
            } else {
                0.0
            };
            sum += probs[c];
        }
        for p in &mut probs {
            *p /= sum;
        }
        Ok(Prediction::from_probs(probs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(dim: usize, entries: &[(usize, f64)]) -> SparseVector {
        SparseVector {
            entries: entries.to_vec(),
            dim,
        }
    }

    #[test]
    fn single_class_training_predicts_it_with_certainty() {
        let x = vec![sv(4, &[(2, 1.0)]), sv(4, &[(3, 1.0)])];
        let y = vec![Sentiment::Positive, Sentiment::Positive];
        let m = train_nb(&x, &y, 1.0).unwrap();
        let p = m.predict(&sv(4, &[(2, 1.0)])).unwrap();
        assert_eq!(p.label, Sentiment::Positive);
        assert_eq!(p.probs, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn toy_posterior_matches_hand_bayes_arithmetic() {
        // Three one-hot documents, one per class, dim 5 (ids 2,3,4 used).
        let x = vec![sv(5, &[(2, 1.0)]), sv(5, &[(3, 1.0)]), sv(5, &[(4, 1.0)])];
        let y = vec![Sentiment::Negative, Sentiment::Positive, Sentiment::Neutral];
        let m = train_nb(&x, &y, 1.0).unwrap();

        // Hand arithmetic: priors 1/3 each; class weight sums are all 1, so
        // denominators are 1 + 5α = 6. P(t=2|neg) = 2/6, P(t=2|pos or neu)
        // = 1/6. Posterior for the document {t=2: 1.0} is proportional to
        // prior · P(t|c)^1.
        let post_neg = (1.0 / 3.0) * (2.0 / 6.0);
        let post_other = (1.0 / 3.0) * (1.0 / 6.0);
        let z = post_neg + 2.0 * post_other;
        let p = m.predict(&sv(5, &[(2, 1.0)])).unwrap();
        assert!((p.probs[0] - post_neg / z).abs() < 1e-12);
        assert!((p.probs[1] - post_other / z).abs() < 1e-12);
        assert!((p.probs[2] - post_other / z).abs() < 1e-12);
        assert_eq!(p.label, Sentiment::Negative);
    }

    #[test]
    fn symmetric_likelihoods_follow_the_prior() {
        // Equal aggregate term weight per class (negative split across two
        // half-weight documents): smoothed likelihoods are identical, they
        // cancel, and the posterior equals the prior (2/4, 1/4, 1/4).
        let half = || sv(4, &[(2, 0.3), (3, 0.4)]);
        let full = || sv(4, &[(2, 0.6), (3, 0.8)]);
        let x = vec![half(), half(), full(), full()];
        let y = vec![
            Sentiment::Negative,
            Sentiment::Negative,
            Sentiment::Positive,
            Sentiment::Neutral,
        ];
        let m = train_nb(&x, &y, 1.0).unwrap();
        let p = m.predict(&full()).unwrap();
        assert!((p.probs[0] - 0.5).abs() < 1e-12);
        assert!((p.probs[1] - 0.25).abs() < 1e-12);
        assert!((p.probs[2] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn likelihoods_sum_to_one_per_class() {
        let x = vec![
            sv(6, &[(2, 0.9), (4, 0.3)]),
            sv(6, &[(3, 1.0)]),
            sv(6, &[(5, 0.5), (2, 0.5)]),
        ];
        let y = vec![Sentiment::Negative, Sentiment::Positive, Sentiment::Neutral];
        let m = train_nb(&x, &y, 1.0).unwrap();
        for c in 0..3 {
            let total: f64 = m.log_likelihood.iter().map(|t| t[c].exp()).sum();
            assert!((total - 1.0).abs() < 1e-9, "class {c} sums to {total}");
        }
        let prior_total: f64 = m.log_prior.iter().map(|lp| lp.exp()).sum();
        assert!((prior_total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn prior_shift_leaves_argmax_unchanged() {
        let x = vec![
            sv(4, &[(2, 1.0)]),
            sv(4, &[(3, 1.0)]),
            sv(4, &[(2, 0.5), (3, 0.5)]),
        ];
        let y = vec![Sentiment::Negative, Sentiment::Positive, Sentiment::Neutral];
        let mut m = train_nb(&x, &y, 1.0).unwrap();
        let probe = sv(4, &[(2, 0.9), (3, 0.1)]);
        let before = m.predict(&probe).unwrap().label;
        for lp in &mut m.log_prior {
            *lp += 3.7;
        }
        assert_eq!(m.predict(&probe).unwrap().label, before);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let x = vec![sv(4, &[(2, 1.0)])];
        let y = vec![Sentiment::Negative, Sentiment::Positive];
        assert!(matches!(
            train_nb(&x, &y, 1.0),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            train_nb(&[], &[], 1.0),
            Err(Error::MissingClass(_))
        ));
        let m = train_nb(&x, &y[..1], 1.0).unwrap();
        assert!(matches!(
            m.predict(&sv(7, &[])),
            Err(Error::DimMismatch {
                expected: 4,
                got: 7
            })
        ));
    }

    #[test]
    fn probabilities_sum_to_one() {
        let x = vec![sv(5, &[(2, 1.0)]), sv(5, &[(3, 1.0)]), sv(5, &[(4, 1.0)])];
        let y = vec![Sentiment::Negative, Sentiment::Positive, Sentiment::Neutral];
        let m = train_nb(&x, &y, 1.0).unwrap();
        for probe in [sv(5, &[]), sv(5, &[(2, 0.3), (4, 0.7)])] {
            let p = m.predict(&probe).unwrap();
            assert!((p.probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
