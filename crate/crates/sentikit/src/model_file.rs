//! Single-file binary container for trained models.
//!
//! Layout: magic `SENTIKIT` (8 bytes), format version (u32 LE), algorithm
//! tag (u8), then four length-prefixed sections in fixed order — metadata
//! (sorted `key=value` lines), vocabulary (`token\tdf` lines in id order),
//! pipeline fingerprint (SHA-256 hashes of the vendored dictionary, slang
//! table, and stopword lists), and the parameter payload (scalars as f64
//! LE). Writing the same model twice produces byte-identical files, and a
//! loaded file carries everything prediction needs except the vendored
//! pipeline resources, whose fingerprint it verifies.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::classifiers::rf::{Node, Tree};
use crate::classifiers::{LrModel, NbModel, RfModel};
use crate::data;
use crate::error::{Error, Result};
use crate::lstm::LstmParams;
use crate::stemmer::hex_string;

const MAGIC: &[u8; 8] = b"SENTIKIT";
const VERSION: u32 = 1;

/// Algorithm tag stored in the header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Nb = 0,
    Lr = 1,
    Rf = 2,
    Lstm = 3,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Nb => "nb",
            Algo::Lr => "lr",
            Algo::Rf => "rf",
            Algo::Lstm => "lstm",
        }
    }

    pub fn from_name(name: &str) -> Result<Algo> {
        match name {
            "nb" => Ok(Algo::Nb),
            "lr" => Ok(Algo::Lr),
            "rf" => Ok(Algo::Rf),
            "lstm" => Ok(Algo::Lstm),
            other => Err(Error::InvalidConfig(format!("unknown model {other:?}"))),
        }
    }

    fn from_tag(tag: u8) -> Result<Algo> {
        match tag {
            0 => Ok(Algo::Nb),
            1 => Ok(Algo::Lr),
            2 => Ok(Algo::Rf),
            3 => Ok(Algo::Lstm),
            other => Err(Error::ModelFormat(format!("unknown algorithm tag {other}"))),
        }
    }
}

/// SHA-256 hex digests of the vendored pipeline resources a model was
/// trained with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    pub dictionary: String,
    pub slang: String,
    pub stopwords: String,
}

fn sha_hex(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    hex_string(&h.finalize())
}

impl Fingerprint {
    /// Fingerprint of the data files compiled into this build.
    pub fn vendored() -> &'static Fingerprint {
        static FP: OnceLock<Fingerprint> = OnceLock::new();
        FP.get_or_init(|| Fingerprint {
            dictionary: sha_hex(data::ROOT_WORDS),
            slang: sha_hex(data::SLANG),
            stopwords: sha_hex(&format!("{}\x00{}", data::STOPWORDS_ID, data::STOPWORDS_EN)),
        })
    }
}

/// A parsed model file. `vocab` lists `(token, df)` in id order, including
/// the reserved pad/unk slots.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub algo: Algo,
    pub meta: BTreeMap<String, String>,
    pub vocab: Vec<(String, usize)>,
    pub fingerprint: Fingerprint,
    pub payload: Vec<u8>,
}

fn push_section(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u64).to_le_bytes());
    out.extend_from_slice(bytes);
}

struct Cursor<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.at + n > self.buf.len() {
            return Err(Error::ModelFormat(format!("truncated {what}")));
        }
        let s = &self.buf[self.at..self.at + n];
        self.at += n;
        Ok(s)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        let b = self.take(8, what)?;
        Ok(u64::from_le_bytes(b.try_into().unwrap()))
    }

    fn section(&mut self, what: &str) -> Result<&'a [u8]> {
        let len = self.u64(what)? as usize;
        self.take(len, what)
    }

    fn text_section(&mut self, what: &str) -> Result<&'a str> {
        let bytes = self.section(what)?;
        std::str::from_utf8(bytes)
            .map_err(|_| Error::ModelFormat(format!("{what} section is not UTF-8")))
    }
}

impl ModelFile {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.algo as u8);

        let mut meta = String::new();
        for (k, v) in &self.meta {
            assert!(
                !k.contains(['=', '\n']) && !v.contains('\n'),
                "metadata keys/values must be line-safe"
            );
            meta.push_str(k);
            meta.push('=');
            meta.push_str(v);
            meta.push('\n');
        }
        push_section(&mut out, meta.as_bytes());

        let mut vocab = String::new();
        for (token, df) in &self.vocab {
            vocab.push_str(token);
            vocab.push('\t');
            vocab.push_str(&df.to_string());
            vocab.push('\n');
        }
        push_section(&mut out, vocab.as_bytes());

        let fp = format!(
            "dictionary={}\nslang={}\nstopwords={}\n",
            self.fingerprint.dictionary, self.fingerprint.slang, self.fingerprint.stopwords
        );
        push_section(&mut out, fp.as_bytes());
        push_section(&mut out, &self.payload);
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<ModelFile> {
        let mut cur = Cursor { buf, at: 0 };
        let magic = cur.take(8, "magic")?;
        if magic != MAGIC {
            return Err(Error::ModelFormat("bad magic; not a model file".into()));
        }
        let version_bytes = cur.take(4, "version")?;
        let version = u32::from_le_bytes(version_bytes.try_into().unwrap());
        if version != VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported format version {version} (expected {VERSION})"
            )));
        }
        let algo = Algo::from_tag(cur.take(1, "algorithm tag")?[0])?;

        let mut meta = BTreeMap::new();
        for line in cur.text_section("metadata")?.lines() {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::ModelFormat(format!("bad metadata line {line:?}")))?;
            meta.insert(k.to_string(), v.to_string());
        }

        let mut vocab = Vec::new();
        for line in cur.text_section("vocabulary")?.lines() {
            let (token, df) = line
                .split_once('\t')
                .ok_or_else(|| Error::ModelFormat(format!("bad vocabulary line {line:?}")))?;
            let df: usize = df
                .parse()
                .map_err(|_| Error::ModelFormat(format!("bad df in line {line:?}")))?;
            vocab.push((token.to_string(), df));
        }

        let mut fields = BTreeMap::new();
        for line in cur.text_section("fingerprint")?.lines() {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::ModelFormat(format!("bad fingerprint line {line:?}")))?;
            fields.insert(k.to_string(), v.to_string());
        }
        let mut field = |name: &str| -> Result<String> {
            fields
                .remove(name)
                .ok_or_else(|| Error::ModelFormat(format!("fingerprint missing {name}")))
        };
        let fingerprint = Fingerprint {
            dictionary: field("dictionary")?,
            slang: field("slang")?,
            stopwords: field("stopwords")?,
        };

        let payload = cur.section("payload")?.to_vec();
        if cur.at != buf.len() {
            return Err(Error::ModelFormat("trailing bytes after payload".into()));
        }
        Ok(ModelFile {
            algo,
            meta,
            vocab,
            fingerprint,
            payload,
        })
    }

    /// Writes atomically: a temp file in the destination directory is
    /// renamed over the target.
    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes = self.to_bytes();
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, &bytes).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<ModelFile> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        ModelFile::from_bytes(&bytes)
    }

    /// Errors unless the stored fingerprint matches this build's vendored
    /// pipeline resources.
    pub fn verify_fingerprint(&self) -> Result<()> {
        let now = Fingerprint::vendored();
        for (field, stored, current) in [
            ("dictionary", &self.fingerprint.dictionary, &now.dictionary),
            ("slang", &self.fingerprint.slang, &now.slang),
            ("stopwords", &self.fingerprint.stopwords, &now.stopwords),
        ] {
            if stored != current {
                return Err(Error::FingerprintMismatch {
                    field: field.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Any trained classifier, for uniform pack/unpack.
#[derive(Debug, Clone)]
pub enum AnyModel {
    Nb(NbModel),
    Lr(LrModel),
    Rf(RfModel),
    Lstm(LstmParams),
}

impl AnyModel {
    pub fn algo(&self) -> Algo {
        match self {
            AnyModel::Nb(_) => Algo::Nb,
            AnyModel::Lr(_) => Algo::Lr,
            AnyModel::Rf(_) => Algo::Rf,
            AnyModel::Lstm(_) => Algo::Lstm,
        }
    }
}

fn push_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn push_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn push_f64s(out: &mut Vec<u8>, vs: &[f64]) {
    for &v in vs {
        push_f64(out, v);
    }
}

impl<'a> Cursor<'a> {
    fn f64(&mut self, what: &str) -> Result<f64> {
        let b = self.take(8, what)?;
        Ok(f64::from_le_bytes(b.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        let b = self.take(8 * n, what)?;
        Ok(b.chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn usize_val(&mut self, what: &str) -> Result<usize> {
        Ok(self.u64(what)? as usize)
    }
}

/// Serializes a model's parameters into the payload section.
pub fn encode_payload(model: &AnyModel) -> Vec<u8> {
    let mut out = Vec::new();
    match model {
        AnyModel::Nb(m) => {
            push_u64(&mut out, m.dim as u64);
            push_f64(&mut out, m.alpha);
            push_f64s(&mut out, &m.log_prior);
            for row in &m.log_likelihood {
                push_f64s(&mut out, row);
            }
        }
        AnyModel::Lr(m) => {
            push_u64(&mut out, m.dim as u64);
            push_f64(&mut out, m.l2);
            push_f64s(&mut out, &m.b);
            push_f64s(&mut out, &m.w);
        }
        AnyModel::Rf(m) => {
            push_u64(&mut out, m.dim as u64);
            push_u64(&mut out, m.max_depth as u64);
            push_u64(&mut out, m.features_per_split as u64);
            push_u64(&mut out, m.trees.len() as u64);
            for tree in &m.trees {
                push_u64(&mut out, tree.nodes.len() as u64);
                for node in &tree.nodes {
                    match node {
                        Node::Leaf { counts } => {
                            out.push(0);
                            for &c in counts {
                                push_u64(&mut out, c as u64);
                            }
                        }
                        Node::Split {
                            feature,
                            threshold,
                            left,
                            right,
                        } => {
                            out.push(1);
                            push_u64(&mut out, *feature as u64);
                            push_f64(&mut out, *threshold);
                            push_u64(&mut out, *left as u64);
                            push_u64(&mut out, *right as u64);
                        }
                    }
                }
            }
        }
        AnyModel::Lstm(p) => {
            push_u64(&mut out, p.vocab_size as u64);
            push_u64(&mut out, p.d as u64);
            push_u64(&mut out, p.h as u64);
            push_u64(&mut out, p.c as u64);
            for field in [&p.e, &p.w, &p.u, &p.b_g, &p.w_out, &p.b_out] {
                push_f64s(&mut out, field);
            }
        }
    }
    out
}

/// Inverse of [`encode_payload`] given the header's algorithm tag.
pub fn decode_payload(algo: Algo, payload: &[u8]) -> Result<AnyModel> {
    let mut cur = Cursor {
        buf: payload,
        at: 0,
    };
    let model = match algo {
        Algo::Nb => {
            let dim = cur.usize_val("nb dim")?;
            let alpha = cur.f64("nb alpha")?;
            let prior = cur.f64s(3, "nb prior")?;
            let mut log_likelihood = Vec::with_capacity(dim);
            for _ in 0..dim {
                let row = cur.f64s(3, "nb likelihood")?;
                log_likelihood.push([row[0], row[1], row[2]]);
            }
            AnyModel::Nb(NbModel {
                dim,
                alpha,
                log_prior: [prior[0], prior[1], prior[2]],
                log_likelihood,
            })
        }
        Algo::Lr => {
            let dim = cur.usize_val("lr dim")?;
            let l2 = cur.f64("lr l2")?;
            let b = cur.f64s(3, "lr bias")?;
            let w = cur.f64s(3 * dim, "lr weights")?;
            AnyModel::Lr(LrModel {
                dim,
                w,
                b: [b[0], b[1], b[2]],
                l2,
            })
        }
        Algo::Rf => {
            let dim = cur.usize_val("rf dim")?;
            let max_depth = cur.usize_val("rf max_depth")?;
            let features_per_split = cur.usize_val("rf features_per_split")?;
            let n_trees = cur.usize_val("rf tree count")?;
            let mut trees = Vec::with_capacity(n_trees);
            for _ in 0..n_trees {
                let n_nodes = cur.usize_val("rf node count")?;
                let mut nodes = Vec::with_capacity(n_nodes);
                for _ in 0..n_nodes {
                    let tag = cur.take(1, "rf node tag")?[0];
                    let node = match tag {
                        0 => {
                            let c0 = cur.usize_val("rf leaf")?;
                            let c1 = cur.usize_val("rf leaf")?;
                            let c2 = cur.usize_val("rf leaf")?;
                            Node::Leaf {
                                counts: [c0, c1, c2],
                            }
                        }
                        1 => Node::Split {
                            feature: cur.usize_val("rf split")?,
                            threshold: cur.f64("rf split")?,
                            left: cur.usize_val("rf split")?,
                            right: cur.usize_val("rf split")?,
                        },
                        other => {
                            return Err(Error::ModelFormat(format!("bad rf node tag {other}")))
                        }
                    };
                    nodes.push(node);
                }
                trees.push(Tree { nodes });
            }
            AnyModel::Rf(RfModel {
                dim,
                trees,
                max_depth,
                features_per_split,
            })
        }
        Algo::Lstm => {
            let vocab_size = cur.usize_val("lstm vocab_size")?;
            let d = cur.usize_val("lstm d")?;
            let h = cur.usize_val("lstm h")?;
            let c = cur.usize_val("lstm c")?;
            let e = cur.f64s(vocab_size * d, "lstm embeddings")?;
            let w = cur.f64s(4 * h * d, "lstm w")?;
            let u = cur.f64s(4 * h * h, "lstm u")?;
            let b_g = cur.f64s(4 * h, "lstm gate bias")?;
            let w_out = cur.f64s(c * h, "lstm head weights")?;
            let b_out = cur.f64s(c, "lstm head bias")?;
            AnyModel::Lstm(LstmParams {
                vocab_size,
                d,
                h,
                c,
                e,
                w,
                u,
                b_g,
                w_out,
                b_out,
            })
        }
    };
    if cur.at != payload.len() {
        return Err(Error::ModelFormat("trailing bytes in payload".into()));
    }
    Ok(model)
}

/// Builds a complete file around a trained model.
pub fn pack(
    model: &AnyModel,
    vocab: Vec<(String, usize)>,
    meta: BTreeMap<String, String>,
) -> ModelFile {
    ModelFile {
        algo: model.algo(),
        meta,
        vocab,
        fingerprint: Fingerprint::vendored().clone(),
        payload: encode_payload(model),
    }
}

/// Decodes the parameter payload of a parsed file.
pub fn unpack(file: &ModelFile) -> Result<AnyModel> {
    decode_payload(file.algo, &file.payload)
}
