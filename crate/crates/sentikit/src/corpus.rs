//! Corpus ingestion, class statistics, and stratified partitioning.
//!
//! Reviews arrive as a semicolon-delimited CSV with a header row. The loader
//! validates labels eagerly, so every downstream stage can assume exactly
//! three classes. Splits and k-folds are stratified per class with
//! largest-remainder seat allocation and are fully determined by the seed.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Sentiment polarity of a review.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sentiment {
    Negative = 0,
    Positive = 1,
    Neutral = 2,
}

impl Sentiment {
    /// All classes in index order.
    pub const ALL: [Sentiment; 3] = [Sentiment::Negative, Sentiment::Positive, Sentiment::Neutral];

    /// Number of classes.
    pub const COUNT: usize = 3;

    /// Maps a label string to a class, case-insensitively. English and
    /// Indonesian spellings are both accepted.
    pub fn from_label(label: &str) -> Option<Sentiment> {
        match label.trim().to_lowercase().as_str() {
            "negative" | "negatif" => Some(Sentiment::Negative),
            "positive" | "positif" => Some(Sentiment::Positive),
            "neutral" | "netral" => Some(Sentiment::Neutral),
            _ => None,
        }
    }

    /// Canonical lowercase English name.
    pub fn name(self) -> &'static str {
        match self {
            Sentiment::Negative => "negative",
            Sentiment::Positive => "positive",
            Sentiment::Neutral => "neutral",
        }
    }

    /// Class for a given index; panics if `i >= 3`.
    pub fn from_index(i: usize) -> Sentiment {
        Sentiment::ALL[i]
    }

    /// Class index (negative 0, positive 1, neutral 2).
    pub fn index(self) -> usize {
        self as usize
    }
}

/// A single labeled review.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Review {
    pub text: String,
    pub label: Sentiment,
}

/// An ordered collection of reviews with cached per-class counts.
#[derive(Debug, Clone)]
pub struct LabeledCorpus {
    records: Vec<Review>,
    counts: [usize; 3],
}

impl LabeledCorpus {
    /// Builds a corpus from records; counts are derived, never supplied.
    pub fn from_records(records: Vec<Review>) -> LabeledCorpus {
        let mut counts = [0usize; 3];
        for r in &records {
            counts[r.label as usize] += 1;
        }
        LabeledCorpus { records, counts }
    }

    pub fn records(&self) -> &[Review] {
        &self.records
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn n(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Sub-corpus formed by the given record indices, in the order given.
    fn subset(&self, indices: &[usize]) -> LabeledCorpus {
        LabeledCorpus::from_records(indices.iter().map(|&i| self.records[i].clone()).collect())
    }
}

/// Options for [`load_csv`].
#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub text_col: String,
    pub label_col: String,
    /// When true, rows with empty review text are skipped and counted
    /// instead of aborting the load.
    pub skip_empty: bool,
}

impl Default for CsvOptions {
    fn default() -> CsvOptions {
        CsvOptions {
            delimiter: b';',
            text_col: "review".to_string(),
            label_col: "sentiment".to_string(),
            skip_empty: false,
        }
    }
}

/// Loads a delimited UTF-8 file with a header row into a corpus. Quoted
/// fields follow RFC-4180 semantics with the configured delimiter. Returns
/// the corpus and the number of skipped empty-text rows (always 0 unless
/// `skip_empty` is set).
pub fn load_csv(path: &Path, opts: &CsvOptions) -> Result<(LabeledCorpus, usize)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(true)
        .from_reader(file);

    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let text_idx = col(&opts.text_col)?;
    let label_idx = col(&opts.label_col)?;

    let mut records = Vec::new();
    let mut skipped = 0usize;
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let data_row = i + 1;
        let text = row.get(text_idx).unwrap_or("").to_string();
        let label_raw = row.get(label_idx).unwrap_or("");
        let label = Sentiment::from_label(label_raw).ok_or(Error::UnknownLabel {
            row: data_row,
            value: label_raw.to_string(),
        })?;
        if text.trim().is_empty() {
            if opts.skip_empty {
                skipped += 1;
                continue;
            }
            return Err(Error::EmptyText { row: data_row });
        }
        records.push(Review { text, label });
    }
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok((LabeledCorpus::from_records(records), skipped))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Utf8 { .. } => Error::BadEncoding(path.display().to_string()),
        csv::ErrorKind::Io(_) => Error::BadEncoding(path.display().to_string()),
        _ => Error::BadEncoding(format!("{}: {e}", path.display())),
    }
}

/// Per-class slice of a distribution report.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ClassStat {
    pub count: usize,
    pub pct: f64,
}

/// Class distribution of a corpus; serializes as `{class: {count, pct}}`
/// plus a total.
#[derive(Debug, Clone, Serialize)]
pub struct Distribution {
    pub classes: BTreeMap<&'static str, ClassStat>,
    pub total: usize,
}

/// Computes per-class counts and percentages (rounded to 2 decimals).
pub fn class_distribution(corpus: &LabeledCorpus) -> Result<Distribution> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = corpus.n();
    let mut classes = BTreeMap::new();
    for c in Sentiment::ALL {
        let count = corpus.counts()[c as usize];
        let pct = (10_000.0 * count as f64 / n as f64).round() / 100.0;
        classes.insert(c.name(), ClassStat { count, pct });
    }
    Ok(Distribution { classes, total: n })
}

/// Parameters for stratified splitting and cross-validation.
#[derive(Debug, Clone, Copy)]
pub struct SplitSpec {
    /// Fraction of each class kept for training, in `(0, 1]`.
    pub train_ratio: f64,
    pub seed: u64,
    /// Fold count for k-fold cross-validation.
    pub k: usize,
}

impl Default for SplitSpec {
    fn default() -> SplitSpec {
        SplitSpec {
            train_ratio: 0.8,
            seed: 42,
            k: 5,
        }
    }
}

/// Largest-remainder apportionment of `total` seats given fractional
/// quotas; ties go to the lower index.
fn largest_remainder(quotas: &[f64], total: usize) -> Vec<usize> {
    let mut seats: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = seats.iter().sum();
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        seats[i] += 1;
    }
    seats
}

/// Splits a corpus into disjoint train and test parts, stratified per class.
///
/// Test sizes follow the largest-remainder rule on `(1 - ratio) * count_c`
/// with the overall test total fixed to `round((1 - ratio) * n)`; ties break
/// by class index. Record order within each part follows the original
/// corpus. Identical seeds give identical memberships.
pub fn stratified_split(
    corpus: &LabeledCorpus,
    spec: &SplitSpec,
) -> Result<(LabeledCorpus, LabeledCorpus)> {
    if !(spec.train_ratio > 0.0 && spec.train_ratio <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "train_ratio must be in (0, 1], got {}",
            spec.train_ratio
        )));
    }
    for c in Sentiment::ALL {
        if corpus.counts()[c as usize] == 0 {
            return Err(Error::EmptyClass(c.name()));
        }
    }

    let test_frac = 1.0 - spec.train_ratio;
    let total_test = (corpus.n() as f64 * test_frac).round() as usize;
    let quotas: Vec<f64> = Sentiment::ALL
        .iter()
        .map(|&c| corpus.counts()[c as usize] as f64 * test_frac)
        .collect();
    let test_counts = largest_remainder(&quotas, total_test);

    let mut rng = Rng::new(spec.seed);
    let mut in_test = vec![false; corpus.n()];
    for c in Sentiment::ALL {
        let mut idx: Vec<usize> = (0..corpus.n())
            .filter(|&i| corpus.records()[i].label == c)
            .collect();
        rng.shuffle(&mut idx);
        for &i in idx.iter().take(test_counts[c as usize]) {
            in_test[i] = true;
        }
    }

    let train_idx: Vec<usize> = (0..corpus.n()).filter(|&i| !in_test[i]).collect();
    let test_idx: Vec<usize> = (0..corpus.n()).filter(|&i| in_test[i]).collect();
    Ok((corpus.subset(&train_idx), corpus.subset(&test_idx)))
}

/// Produces `k` stratified (train, validation) pairs that partition the
/// corpus.
///
/// Each class contributes `floor(count_c / k)` records to every fold; the
/// remainder seats go to the folds with the smallest running totals (ties to
/// the lower fold index), so fold sizes stay as even as possible while every
/// per-class count is within one of `count_c / k`. Classes absent from the
/// corpus are ignored.
pub fn stratified_kfold(
    corpus: &LabeledCorpus,
    spec: &SplitSpec,
) -> Result<Vec<(LabeledCorpus, LabeledCorpus)>> {
    let k = spec.k;
    let min_count = Sentiment::ALL
        .iter()
        .map(|&c| corpus.counts()[c as usize])
        .filter(|&n| n > 0)
        .min()
        .unwrap_or(0);
    if k < 2 || k > min_count {
        return Err(Error::FoldTooLarge { k, min_count });
    }

    // Per-class seats per fold, balancing fold totals.
    let mut fold_load = vec![0usize; k];
    let mut seats = vec![[0usize; 3]; k];
    for c in Sentiment::ALL {
        let count = corpus.counts()[c as usize];
        if count == 0 {
            continue;
        }
        let base = count / k;
        let extra = count % k;
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&f| (fold_load[f], f));
        for (rank, &f) in order.iter().enumerate() {
            seats[f][c as usize] = base + usize::from(rank < extra);
        }
        for f in 0..k {
            fold_load[f] += seats[f][c as usize];
        }
    }

    // Deal shuffled per-class indices out to the folds.
    let mut rng = Rng::new(spec.seed);
    let mut fold_of = vec![0usize; corpus.n()];
    for c in Sentiment::ALL {
        let mut idx: Vec<usize> = (0..corpus.n())
            .filter(|&i| corpus.records()[i].label == c)
            .collect();
        if idx.is_empty() {
            continue;
        }
        rng.shuffle(&mut idx);
        let mut cursor = 0usize;
        for (f, fold_seats) in seats.iter().enumerate() {
            for _ in 0..fold_seats[c as usize] {
                fold_of[idx[cursor]] = f;
                cursor += 1;
            }
        }
    }

    let mut pairs = Vec::with_capacity(k);
    for f in 0..k {
        let val_idx: Vec<usize> = (0..corpus.n()).filter(|&i| fold_of[i] == f).collect();
        let train_idx: Vec<usize> = (0..corpus.n()).filter(|&i| fold_of[i] != f).collect();
        pairs.push((corpus.subset(&train_idx), corpus.subset(&val_idx)));
    }
    Ok(pairs)
}
