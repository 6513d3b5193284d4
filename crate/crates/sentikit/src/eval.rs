//! Evaluation: confusion matrices, one-vs-rest per-class metrics, weighted
//! and macro aggregates, model leaderboards, and cross-validation summaries.
//!
//! Zero-denominator ratios are reported as 0.0 with an `undefined_*` flag
//! instead of NaN, and zero-support classes carry no weight in the
//! support-weighted averages.

use crate::error::{Error, Result};
use serde::Serialize;

/// C×C count matrix; `m[i][j]` is the number of samples with true class `i`
/// predicted as class `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub m: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    /// Tallies label pairs into an `n_classes`×`n_classes` matrix.
    pub fn from_labels(
        y_true: &[usize],
        y_pred: &[usize],
        n_classes: usize,
    ) -> Result<ConfusionMatrix> {
        if y_true.len() != y_pred.len() {
            return Err(Error::LengthMismatch {
                left: y_true.len(),
                right: y_pred.len(),
            });
        }
        if y_true.is_empty() {
            return Err(Error::EmptyEval);
        }
        let mut m = vec![vec![0usize; n_classes]; n_classes];
        for (&t, &p) in y_true.iter().zip(y_pred) {
            assert!(t < n_classes && p < n_classes, "label out of range");
            m[t][p] += 1;
        }
        Ok(ConfusionMatrix { m })
    }

    pub fn n_classes(&self) -> usize {
        self.m.len()
    }

    pub fn total(&self) -> usize {
        self.m.iter().map(|row| row.iter().sum::<usize>()).sum()
    }

    /// Correctly classified count (diagonal sum).
    pub fn trace(&self) -> usize {
        self.m.iter().enumerate().map(|(i, row)| row[i]).sum()
    }

    /// True instances of class `c` (row sum).
    pub fn support(&self, c: usize) -> usize {
        self.m[c].iter().sum()
    }

    /// Predicted instances of class `c` (column sum).
    pub fn predicted(&self, c: usize) -> usize {
        self.m.iter().map(|row| row[c]).sum()
    }

    /// CSV rendering with a `true\pred` corner cell and one row per class.
    pub fn to_csv(&self, class_names: &[&str]) -> String {
        assert_eq!(class_names.len(), self.n_classes());
        let mut out = String::from("true\\pred");
        for name in class_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, row) in self.m.iter().enumerate() {
            out.push_str(class_names[i]);
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// One-vs-rest metrics for a single class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
    pub undefined_precision: bool,
    pub undefined_recall: bool,
}

/// Accuracy plus per-class, support-weighted, and macro-averaged metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSet {
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

/// Computes the full metric set from a confusion matrix.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricSet> {
    let n = cm.total();
    if n == 0 {
        return Err(Error::EmptyEval);
    }
    let c = cm.n_classes();
    let mut per_class = Vec::with_capacity(c);
    let mut wp = 0.0;
    let mut wf1 = 0.0;
    let mut mp = 0.0;
    let mut mr = 0.0;
    let mut mf1 = 0.0;
    for ci in 0..c {
        let tp = cm.m[ci][ci] as f64;
        let support = cm.support(ci);
        let predicted = cm.predicted(ci);
        let undefined_precision = predicted == 0;
        let undefined_recall = support == 0;
        let precision = if undefined_precision {
            0.0
        } else {
            tp / predicted as f64
        };
        let recall = if undefined_recall {
            0.0
        } else {
            tp / support as f64
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        wp += support as f64 * precision;
        wf1 += support as f64 * f1;
        mp += precision;
        mr += recall;
        mf1 += f1;
        per_class.push(ClassMetrics {
            precision,
            recall,
            f1,
            support,
            undefined_precision,
            undefined_recall,
        });
    }
    let nf = n as f64;
    // Support-weighted recall is trace/n by algebra; computing it that way
    // keeps the identity with accuracy exact in floating point.
    let accuracy = cm.trace() as f64 / nf;
    Ok(MetricSet {
        accuracy,
        per_class,
        weighted_precision: wp / nf,
        weighted_recall: accuracy,
        weighted_f1: wf1 / nf,
        macro_precision: mp / c as f64,
        macro_recall: mr / c as f64,
        macro_f1: mf1 / c as f64,
    })
}

/// One model's headline (weighted) numbers for the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeaderboardRow {
    pub name: String,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl LeaderboardRow {
    pub fn from_metrics(name: &str, m: &MetricSet) -> LeaderboardRow {
        LeaderboardRow {
            name: name.to_string(),
            accuracy: m.accuracy,
            precision: m.weighted_precision,
            recall: m.weighted_recall,
            f1: m.weighted_f1,
        }
    }
}

/// Sorts rows best-first: weighted F1 descending, ties broken by accuracy
/// descending, then name ascending.
pub fn leaderboard(mut rows: Vec<LeaderboardRow>) -> Result<Vec<LeaderboardRow>> {
    if rows.is_empty() {
        return Err(Error::EmptyEval);
    }
    rows.sort_by(|a, b| {
        b.f1.total_cmp(&a.f1)
            .then(b.accuracy.total_cmp(&a.accuracy))
            .then(a.name.cmp(&b.name))
    });
    Ok(rows)
}

/// Fixed-column text table.
pub fn leaderboard_text(rows: &[LeaderboardRow]) -> String {
    let mut out = format!(
        "{:<10} {:>9} {:>10} {:>9} {:>9}\n",
        "model", "accuracy", "precision", "recall", "f1"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<10} {:>9.4} {:>10.4} {:>9.4} {:>9.4}\n",
            r.name, r.accuracy, r.precision, r.recall, r.f1
        ));
    }
    out
}

/// CSV rendering, one row per model.
pub fn leaderboard_csv(rows: &[LeaderboardRow]) -> String {
    let mut out = String::from("model,accuracy,precision,recall,f1\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6}\n",
            r.name, r.accuracy, r.precision, r.recall, r.f1
        ));
    }
    out
}

/// Arithmetic mean and population standard deviation of one metric across
/// folds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

fn mean_std(values: &[f64]) -> MeanStd {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k;
    MeanStd {
        mean,
        std: var.sqrt(),
    }
}

/// Cross-validation aggregate over the headline metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvSummary {
    pub k: usize,
    pub accuracy: MeanStd,
    pub weighted_precision: MeanStd,
    pub weighted_recall: MeanStd,
    pub weighted_f1: MeanStd,
}

/// Aggregates per-fold metric sets; requires at least two folds.
pub fn cv_aggregate(folds: &[MetricSet]) -> Result<CvSummary> {
    if folds.len() < 2 {
        return Err(Error::TooFewFolds(folds.len()));
    }
    let pick = |f: fn(&MetricSet) -> f64| -> MeanStd {
        let vals: Vec<f64> = folds.iter().map(f).collect();
        mean_std(&vals)
    };
    Ok(CvSummary {
        k: folds.len(),
        accuracy: pick(|m| m.accuracy),
        weighted_precision: pick(|m| m.weighted_precision),
        weighted_recall: pick(|m| m.weighted_recall),
        weighted_f1: pick(|m| m.weighted_f1),
    })
}

/// Full evaluation record for one model, serialized to JSON by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub model: String,
    pub class_names: Vec<String>,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricSet,
}
