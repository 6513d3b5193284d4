//! Seven-stage text normalization pipeline.
//!
//! Stages run in a fixed order: case folding, cleanup, tokenization, slang
//! normalization, stopword removal, stemming, truncation. Slang
//! normalization is token-wise, so it runs after tokenization even though it
//! is conventionally listed before; the composed result is the same for
//! whitespace-delimited slang. Every stage is pure and total on valid UTF-8.

use std::collections::{HashMap, HashSet};

use crate::data;
use crate::stemmer::{self, RootDictionary};

/// A tokenized document: ordered lowercase tokens without whitespace.
pub type TokenSeq = Vec<String>;

/// Which stages [`run_pipeline`] applies. Tokenization always happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageFlags {
    pub case_fold: bool,
    pub clean: bool,
    pub normalize_slang: bool,
    pub remove_stopwords: bool,
    pub stem: bool,
    pub truncate: bool,
}

impl Default for StageFlags {
    fn default() -> StageFlags {
        StageFlags {
            case_fold: true,
            clean: true,
            normalize_slang: true,
            remove_stopwords: true,
            stem: true,
            truncate: true,
        }
    }
}

/// Pipeline configuration: truncation length, lexicons, stage switches.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub max_tokens: usize,
    pub slang: HashMap<String, String>,
    pub stopwords: HashSet<String>,
    pub stages: StageFlags,
}

impl PipelineConfig {
    /// Configuration backed by the vendored slang lexicon and the union of
    /// the vendored Indonesian and English stopword lists.
    pub fn vendored() -> PipelineConfig {
        let slang = data::parse_tsv_pairs(data::SLANG)
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let stopwords = data::parse_wordlist(data::STOPWORDS_ID)
            .into_iter()
            .chain(data::parse_wordlist(data::STOPWORDS_EN))
            .map(str::to_string)
            .collect();
        PipelineConfig {
            max_tokens: 100,
            slang,
            stopwords,
            stages: StageFlags::default(),
        }
    }

    /// Configuration with empty lexicons; useful in tests.
    pub fn bare() -> PipelineConfig {
        PipelineConfig {
            max_tokens: 100,
            slang: HashMap::new(),
            stopwords: HashSet::new(),
            stages: StageFlags::default(),
        }
    }
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig::vendored()
    }
}

/// Stage 1: Unicode lowercasing. Idempotent.
pub fn case_fold(text: &str) -> String {
    text.to_lowercase()
}

/// Removes every span that begins with a marker accepted by `is_start` and
/// runs to the next whitespace.
fn remove_spans(text: &str, is_start: impl Fn(&str) -> bool) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while !rest.is_empty() {
        if is_start(rest) {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            rest = &rest[end..];
        } else {
            let mut chars = rest.chars();
            out.push(chars.next().unwrap());
            rest = chars.as_str();
        }
    }
    out
}

fn starts_url(s: &str) -> bool {
    let lower = |prefix: &str| {
        s.len() >= prefix.len()
            && s.as_bytes()[..prefix.len()].eq_ignore_ascii_case(prefix.as_bytes())
    };
    lower("http://") || lower("https://") || lower("www.")
}

/// Stage 2: cleanup. Removes URLs, mentions, and hashtags; replaces every
/// non-letter with a space; collapses runs of three or more identical
/// letters to one; collapses whitespace runs and trims. Idempotent.
pub fn clean(text: &str) -> String {
    let no_urls = remove_spans(text, starts_url);
    let no_mentions = remove_spans(&no_urls, |s| s.starts_with('@'));
    let no_hashtags = remove_spans(&no_mentions, |s| s.starts_with('#'));

    let letters: String = no_hashtags
        .chars()
        .map(|c| if c.is_alphabetic() { c } else { ' ' })
        .collect();

    let mut collapsed = String::with_capacity(letters.len());
    let mut run_char = '\0';
    let mut run_len = 0usize;
    for c in letters.chars().chain(std::iter::once('\0')) {
        if c == run_char {
            run_len += 1;
            continue;
        }
        if run_len > 0 {
            let keep = if run_len >= 3 { 1 } else { run_len };
            for _ in 0..keep {
                collapsed.push(run_char);
            }
        }
        run_char = c;
        run_len = 1;
    }

    let mut out = String::with_capacity(collapsed.len());
    for word in collapsed.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Stage 3 (order: after tokenization): splits on whitespace runs.
pub fn tokenize(text: &str) -> TokenSeq {
    text.split_whitespace().map(str::to_string).collect()
}

/// Stage 4: maps each token through the slang lexicon; unknown tokens pass
/// unchanged. Length-preserving.
pub fn normalize_slang(tokens: TokenSeq, lexicon: &HashMap<String, String>) -> TokenSeq {
    tokens
        .into_iter()
        .map(|t| lexicon.get(&t).cloned().unwrap_or(t))
        .collect()
}

/// Stage 5: order-preserving stopword filter.
pub fn remove_stopwords(tokens: TokenSeq, stopwords: &HashSet<String>) -> TokenSeq {
    tokens
        .into_iter()
        .filter(|t| !stopwords.contains(t))
        .collect()
}

/// Stage 7: keeps the first `max_tokens` tokens.
pub fn truncate(mut tokens: TokenSeq, max_tokens: usize) -> TokenSeq {
    tokens.truncate(max_tokens);
    tokens
}

/// Runs the full pipeline: case_fold, clean, tokenize, normalize_slang,
/// remove_stopwords, stem (stage 6, see [`crate::stemmer`]), truncate.
pub fn run_pipeline(text: &str, cfg: &PipelineConfig, dict: &RootDictionary) -> TokenSeq {
    let stages = cfg.stages;
    let mut s = if stages.case_fold {
        case_fold(text)
    } else {
        text.to_string()
    };
    if stages.clean {
        s = clean(&s);
    }
    let mut tokens = tokenize(&s);
    if stages.normalize_slang {
        tokens = normalize_slang(tokens, &cfg.slang);
    }
    if stages.remove_stopwords {
        tokens = remove_stopwords(tokens, &cfg.stopwords);
    }
    if stages.stem {
        tokens = stemmer::stem_seq(&tokens, dict);
    }
    if stages.truncate {
        tokens = truncate(tokens, cfg.max_tokens);
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_fold_lowers_and_is_idempotent() {
        assert_eq!(case_fold("Bagus Banget!"), "bagus banget!");
        assert_eq!(case_fold("sudah kecil"), "sudah kecil");
        assert_eq!(case_fold("GG😀"), "gg😀");
        let once = case_fold("Bagus Banget!");
        assert_eq!(case_fold(&once), once);
    }

    #[test]
    fn clean_removes_noise_in_documented_order() {
        assert_eq!(
            clean("game bagus!!! 😀 http://t.co/x @dev #ml 2024"),
            "game bagus"
        );
        assert_eq!(clean(""), "");
        assert_eq!(clean("😡😡😡"), "");
        assert_eq!(clean("kerennn bangeeeet"), "keren banget");
        assert_eq!(clean("good dobel oke"), "good dobel oke");
        assert_eq!(clean("WWW.SPAM.COM halo https://a.b"), "halo");
        let once = clean("hahaa!!! @x #y 123");
        assert_eq!(clean(&once), once);
    }

    #[test]
    fn tokenize_splits_whitespace_runs() {
        assert_eq!(tokenize("game bagus"), vec!["game", "bagus"]);
        assert_eq!(tokenize("a   b"), vec!["a", "b"]);
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn slang_normalization_is_lookup_only() {
        let lex: HashMap<String, String> = [("gk".to_string(), "tidak".to_string())]
            .into_iter()
            .collect();
        let toks = vec!["gk".to_string(), "bagus".to_string()];
        assert_eq!(normalize_slang(toks, &lex), vec!["tidak", "bagus"]);
        assert_eq!(normalize_slang(vec!["zzz".to_string()], &lex), vec!["zzz"]);
        let empty = HashMap::new();
        assert_eq!(normalize_slang(vec!["gk".to_string()], &empty), vec!["gk"]);
    }

    #[test]
    fn stopword_removal_filters_in_order() {
        let stop: HashSet<String> = [String::from("ini")].into_iter().collect();
        let toks = vec!["game".to_string(), "ini".to_string(), "bagus".to_string()];
        assert_eq!(remove_stopwords(toks, &stop), vec!["game", "bagus"]);
        assert!(remove_stopwords(vec!["ini".to_string()], &stop).is_empty());
        let none = HashSet::new();
        assert_eq!(
            remove_stopwords(vec!["ini".to_string()], &none),
            vec!["ini"]
        );
    }

    #[test]
    fn truncate_boundaries() {
        let many: TokenSeq = (0..150).map(|i| format!("t{i}")).collect();
        assert_eq!(truncate(many.clone(), 100).len(), 100);
        assert_eq!(truncate(many[..50].to_vec(), 100).len(), 50);
        assert_eq!(truncate(many[..100].to_vec(), 100).len(), 100);
    }

    #[test]
    fn pipeline_composes_stage_by_stage() {
        let cfg = PipelineConfig::vendored();
        let dict = RootDictionary::vendored();
        let text = "Gamenya bagus bangeeeet!!!";

        // Stage-by-stage hand composition.
        let folded = case_fold(text);
        let cleaned = clean(&folded);
        assert_eq!(cleaned, "gamenya bagus banget");
        let toks = tokenize(&cleaned);
        let toks = normalize_slang(toks, &cfg.slang);
        let toks = remove_stopwords(toks, &cfg.stopwords);
        let toks = crate::stemmer::stem_seq(&toks, dict);
        let manual = truncate(toks, cfg.max_tokens);

        assert_eq!(run_pipeline(text, &cfg, dict), manual);
        // "gamenya" keeps its clitic: "game" is a loanword outside the root
        // dictionary, so no strip is ever confirmed.
        assert_eq!(manual, vec!["gamenya", "bagus", "banget"]);
    }

    #[test]
    fn pipeline_respects_truncation_and_empties() {
        let cfg = PipelineConfig::vendored();
        let dict = RootDictionary::vendored();
        assert!(run_pipeline("", &cfg, dict).is_empty());

        let mut small = cfg.clone();
        small.max_tokens = 3;
        let long = "bagus jelek seru lambat keren mantap";
        assert_eq!(run_pipeline(long, &small, dict).len(), 3);
    }

    #[test]
    fn pipeline_output_is_lowercase_letters_only() {
        let cfg = PipelineConfig::vendored();
        let dict = RootDictionary::vendored();
        for text in ["Mantap GG 100%!!", "B4gus @user #tag", "WWW.X.COM seруууу"] {
            for tok in run_pipeline(text, &cfg, dict) {
                assert!(tok.chars().all(|c| c.is_lowercase() || !c.is_ascii()));
                assert!(!tok.contains(char::is_whitespace));
            }
        }
    }
}
