//! Vendored data files, embedded at compile time.
//!
//! The raw texts live under `data/` together with `MANIFEST.txt`, which
//! records SHA-256 checksums and provenance for each file. Embedding makes a
//! compiled binary self-contained: predictions never depend on files lying
//! around next to the executable.

/// Indonesian root-word dictionary, one lowercase root per line.
pub const ROOT_WORDS: &str = include_str!("../data/root_words.txt");

/// Indonesian stopword list, one token per line.
pub const STOPWORDS_ID: &str = include_str!("../data/stopwords_id.txt");

/// English stopword list, one token per line.
pub const STOPWORDS_EN: &str = include_str!("../data/stopwords_en.txt");

/// Slang normalization lexicon, `raw<TAB>standard` with `#` comments.
pub const SLANG: &str = include_str!("../data/slang.tsv");

/// Golden stemming pairs, `word<TAB>root` with `#` comments.
pub const GOLDEN_STEMS: &str = include_str!("../data/golden_stems.tsv");

/// Parses a one-token-per-line list, skipping blanks and `#` comments.
pub fn parse_wordlist(text: &str) -> Vec<&str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

/// Parses a two-column tab-separated file, skipping blanks and `#` comments.
pub fn parse_tsv_pairs(text: &str) -> Vec<(&str, &str)> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once('\t').map(|(a, b)| (a.trim(), b.trim())))
        .collect()
}
