//! Text representations: TF-IDF sparse vectors for the classical models and
//! padded integer sequences for the LSTM.
//!
//! Both share a [`Vocabulary`] built from training documents only. Ids 0 and
//! 1 are reserved for padding and unknown tokens; corpus terms start at id 2
//! and are ordered by descending document frequency, ties alphabetical, so
//! vocabularies are stable across runs.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::preprocess::TokenSeq;

/// Reserved id for right-padding.
pub const PAD: usize = 0;
/// Reserved id for out-of-vocabulary tokens in sequences.
pub const UNK: usize = 1;

/// Token ↔ id mapping with PAD/UNK reserved. `len()` counts every id
/// including the two reserved ones; this is the |V| that sizes embedding
/// matrices and TF-IDF dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    token_to_id: HashMap<String, usize>,
    id_to_token: Vec<String>,
    min_freq: usize,
}

impl Vocabulary {
    /// Builds the vocabulary from training documents: every token whose
    /// document frequency is at least `min_freq` gets an id, assigned in
    /// descending document frequency with alphabetical tie-breaks.
    pub fn build(docs: &[TokenSeq], min_freq: usize) -> Result<Vocabulary> {
        let df = document_frequencies(docs)?;
        let mut terms: Vec<(&String, &usize)> = df.iter().filter(|(_, &c)| c >= min_freq).collect();
        terms.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));

        let mut id_to_token = vec!["<pad>".to_string(), "<unk>".to_string()];
        let mut token_to_id = HashMap::new();
        for (token, _) in terms {
            token_to_id.insert(token.clone(), id_to_token.len());
            id_to_token.push(token.clone());
        }
        Ok(Vocabulary {
            token_to_id,
            id_to_token,
            min_freq,
        })
    }

    /// Rebuilds a vocabulary from terms already in id order (ids 2, 3, ...),
    /// as stored in a model file.
    pub fn from_terms(terms: &[String], min_freq: usize) -> Vocabulary {
        let mut id_to_token = vec!["<pad>".to_string(), "<unk>".to_string()];
        let mut token_to_id = HashMap::new();
        for term in terms {
            token_to_id.insert(term.clone(), id_to_token.len());
            id_to_token.push(term.clone());
        }
        Vocabulary {
            token_to_id,
            id_to_token,
            min_freq,
        }
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.id_to_token.get(id).map(String::as_str)
    }

    /// Total id count, PAD and UNK included.
    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    /// True when no corpus term made the frequency cut.
    pub fn is_empty(&self) -> bool {
        self.id_to_token.len() == 2
    }

    /// Corpus terms only (ids ≥ 2), in id order.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.id_to_token.iter().skip(2).map(String::as_str)
    }

    pub fn min_freq(&self) -> usize {
        self.min_freq
    }
}

fn document_frequencies(docs: &[TokenSeq]) -> Result<HashMap<String, usize>> {
    if docs.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let mut df: HashMap<String, usize> = HashMap::new();
    for doc in docs {
        let mut seen: Vec<&String> = doc.iter().collect();
        seen.sort();
        seen.dedup();
        for token in seen {
            *df.entry(token.clone()).or_insert(0) += 1;
        }
    }
    Ok(df)
}

/// Which idf form to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdfVariant {
    /// ln(N/df + 1): never zero, never negative. The default.
    #[default]
    PlusOne,
    /// ln(N/(df+1)): the alternate form, selectable for comparison.
    DfPlusOne,
}

impl IdfVariant {
    pub fn name(self) -> &'static str {
        match self {
            IdfVariant::PlusOne => "plus-one",
            IdfVariant::DfPlusOne => "df-plus-one",
        }
    }

    pub fn from_name(name: &str) -> Result<IdfVariant> {
        match name {
            "plus-one" => Ok(IdfVariant::PlusOne),
            "df-plus-one" => Ok(IdfVariant::DfPlusOne),
            other => Err(Error::InvalidConfig(format!(
                "unknown idf variant {other:?} (expected plus-one or df-plus-one)"
            ))),
        }
    }
}

/// tf · idf with natural logarithms. `df` must be ≥ 1 (the term was seen in
/// training) and `n_docs` ≥ df.
pub fn tfidf_weight(tf: usize, df: usize, n_docs: usize, variant: IdfVariant) -> Result<f64> {
    if df == 0 {
        return Err(Error::ZeroDf);
    }
    let n = n_docs as f64;
    let d = df as f64;
    let idf = match variant {
        IdfVariant::PlusOne => (n / d + 1.0).ln(),
        IdfVariant::DfPlusOne => (n / (d + 1.0)).ln(),
    };
    Ok(tf as f64 * idf)
}

/// Fitted TF-IDF vectorizer: vocabulary plus per-term document frequencies.
#[derive(Debug, Clone)]
pub struct TfIdfModel {
    pub vocab: Vocabulary,
    /// Indexed by vocabulary id; PAD/UNK slots hold 0.
    pub df: Vec<usize>,
    pub n_docs: usize,
    pub variant: IdfVariant,
}

impl TfIdfModel {
    /// Fits vocabulary and document frequencies on training documents.
    pub fn fit(docs: &[TokenSeq], min_freq: usize, variant: IdfVariant) -> Result<TfIdfModel> {
        let vocab = Vocabulary::build(docs, min_freq)?;
        let counts = document_frequencies(docs)?;
        let mut df = vec![0usize; vocab.len()];
        for (token, count) in &counts {
            if let Some(id) = vocab.id(token) {
                df[id] = *count;
            }
        }
        Ok(TfIdfModel {
            vocab,
            df,
            n_docs: docs.len(),
            variant,
        })
    }

    /// Feature dimension = |V| (reserved ids included, never populated).
    pub fn dim(&self) -> usize {
        self.vocab.len()
    }

    /// One document → L2-normalized sparse TF-IDF vector. Out-of-vocabulary
    /// tokens are dropped; an all-OOV document becomes the zero vector.
    pub fn vectorize(&self, tokens: &[String]) -> SparseVector {
        let mut tf: BTreeMap<usize, usize> = BTreeMap::new();
        for token in tokens {
            if let Some(id) = self.vocab.id(token) {
                *tf.entry(id).or_insert(0) += 1;
            }
        }
        let mut entries: Vec<(usize, f64)> = tf
            .into_iter()
            .map(|(id, count)| {
                let w = tfidf_weight(count, self.df[id], self.n_docs, self.variant)
                    .expect("df ≥ 1 for every vocabulary term");
                (id, w)
            })
            .collect();
        let norm = entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, w) in &mut entries {
                *w /= norm;
            }
        }
        SparseVector {
            entries,
            dim: self.dim(),
        }
    }

    /// Vectorizes a whole corpus in order.
    pub fn vectorize_all(&self, docs: &[TokenSeq]) -> Vec<SparseVector> {
        docs.iter().map(|d| self.vectorize(d)).collect()
    }

    /// TSV dump: id, token, df — one line per corpus term.
    pub fn vocab_tsv(&self) -> String {
        let mut out = String::from("id\ttoken\tdf\n");
        for (offset, token) in self.vocab.terms().enumerate() {
            let id = offset + 2;
            out.push_str(&format!("{id}\t{token}\t{}\n", self.df[id]));
        }
        out
    }
}

/// Sparse document vector with strictly increasing term ids.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    pub entries: Vec<(usize, f64)>,
    pub dim: usize,
}

impl SparseVector {
    pub fn zero(dim: usize) -> SparseVector {
        SparseVector {
            entries: Vec::new(),
            dim,
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    /// Value at a feature index (0 when absent).
    pub fn get(&self, id: usize) -> f64 {
        match self.entries.binary_search_by_key(&id, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }
}

/// Fixed-length id sequence; positions at and past `true_len` are PAD.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedSeq {
    pub ids: Vec<usize>,
    pub true_len: usize,
}

/// Maps tokens to ids (OOV → UNK), truncates to `l`, right-pads with PAD.
pub fn encode_seq(tokens: &[String], vocab: &Vocabulary, l: usize) -> PaddedSeq {
    let mut ids: Vec<usize> = tokens
        .iter()
        .take(l)
        .map(|t| vocab.id(t).unwrap_or(UNK))
        .collect();
    let true_len = ids.len();
    ids.resize(l, PAD);
    PaddedSeq { ids, true_len }
}

/// Inverse of [`encode_seq`] up to UNK substitution and truncation.
pub fn decode_seq(seq: &PaddedSeq, vocab: &Vocabulary) -> TokenSeq {
    seq.ids[..seq.true_len]
        .iter()
        .map(|&id| vocab.token(id).unwrap_or("<unk>").to_string())
        .collect()
}
