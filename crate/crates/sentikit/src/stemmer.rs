//! Confix-stripping Indonesian stemmer.
//!
//! Affixed Indonesian words are reduced to dictionary roots by stripping
//! inflectional particles (-lah, -kah, -tah, -pun), possessive clitics
//! (-ku, -mu, -nya), derivational suffixes (-i, -kan, -an) and derivational
//! prefixes (di-, ke-, se-, me-, be-, pe-, te- with their allomorph and
//! recoding variants), checking the root dictionary after every strip. When
//! a word carries one of the confix shapes be-...-lah, be-...-an, me-...-i,
//! di-...-i, pe-...-i or ter-...-i, prefixes are tried before suffixes;
//! otherwise suffixes come off first. A final restoration pass re-appends
//! removed suffix material piece by piece (splitting -kan into k + an) and
//! retries prefix stripping, which recovers roots such as "naik" from
//! "kenaikan". If no strip sequence reaches a dictionary root the original
//! word is returned unchanged.
//!
//! Classically forbidden prefix–suffix combinations (be-+-i, di-+-an,
//! ke-+-i/-kan, me-+-an, se-+-i/-kan) are never stripped as a pair. Prefix
//! removal stops after three strips, when the same two-letter prefix would
//! repeat, or when fewer than three characters remain.
//!
//! Deliberate simplifications against the full classical rule table, chosen
//! because golden-list agreement (see `data/golden_stems.tsv`) is the
//! fidelity metric: the ku-/kau- pronoun clitics are not treated as
//! prefixes, the loanword suffixes -is/-isme/-isasi are not stripped, and
//! prefix patterns match at the start of the word only. Non-ASCII words are
//! returned unchanged; the dictionary contains ASCII roots only.

use std::collections::HashSet;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::data;
use crate::preprocess::TokenSeq;

/// Dictionary of known root words; the lookup oracle every strip is checked
/// against.
#[derive(Debug)]
pub struct RootDictionary {
    roots: HashSet<String>,
    source_hash: String,
}

impl RootDictionary {
    /// Parses a one-root-per-line wordlist (`#` comments allowed) and
    /// records the SHA-256 of the raw text.
    pub fn from_text(text: &str) -> RootDictionary {
        let roots = data::parse_wordlist(text)
            .into_iter()
            .map(str::to_string)
            .collect();
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        RootDictionary {
            roots,
            source_hash: hex_string(&hasher.finalize()),
        }
    }

    /// The vendored dictionary, parsed once per process.
    pub fn vendored() -> &'static RootDictionary {
        static DICT: OnceLock<RootDictionary> = OnceLock::new();
        DICT.get_or_init(|| RootDictionary::from_text(data::ROOT_WORDS))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.roots.contains(word)
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Hex SHA-256 of the source wordlist.
    pub fn source_hash(&self) -> &str {
        &self.source_hash
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// One applied rule and the word form it produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: String,
    pub form: String,
}

/// The successful rule chain for a stemmed word: applying `steps` in order
/// to `input` yields `output`. Empty when the word passed through unchanged.
#[derive(Debug, Clone)]
pub struct StemTrace {
    pub input: String,
    pub steps: Vec<TraceStep>,
    pub output: String,
}

/// Stems one word. Total: unknown shapes come back unchanged.
pub fn stem(word: &str, dict: &RootDictionary) -> String {
    stem_trace(word, dict).output
}

/// Element-wise stemming; length-preserving.
pub fn stem_seq(tokens: &[String], dict: &RootDictionary) -> TokenSeq {
    tokens.iter().map(|t| stem(t, dict)).collect()
}

/// Stems one word, recording the applied rule chain.
pub fn stem_trace(word: &str, dict: &RootDictionary) -> StemTrace {
    let lowered;
    let w: &str = if word.chars().any(char::is_uppercase) {
        lowered = word.to_lowercase();
        &lowered
    } else {
        word
    };

    let fallback = |steps: Vec<TraceStep>, output: &str| StemTrace {
        input: word.to_string(),
        steps,
        output: output.to_string(),
    };

    if w.chars().count() < 3 || !w.bytes().all(|b| b.is_ascii_lowercase()) {
        return fallback(vec![], w);
    }
    if dict.contains(w) {
        return fallback(vec![], w);
    }

    match stem_engine(w, dict) {
        Some((root, steps)) => fallback(steps, &root),
        None => fallback(vec![], w),
    }
}

const VOWELS: &[u8] = b"aiueo";

fn vowel(b: u8) -> bool {
    VOWELS.contains(&b)
}

/// Confixes whose prefix comes off before the suffix.
fn prefix_first(w: &str) -> bool {
    let ends = |s: &str| w.ends_with(s);
    (w.starts_with("be") && w.len() >= 6 && ends("lah"))
        || (w.starts_with("be") && w.len() >= 5 && ends("an"))
        || (w.starts_with("me") && w.len() >= 4 && ends("i"))
        || (w.starts_with("di") && w.len() >= 4 && ends("i"))
        || (w.starts_with("pe") && w.len() >= 4 && ends("i"))
        || (w.starts_with("ter") && w.len() >= 5 && ends("i"))
}

/// Classically disallowed prefix–suffix pairs; the suffix half is never
/// stripped while the word still carries the prefix half.
fn forbidden_pair(w: &str, suffix: &str) -> bool {
    let p = if w.len() >= 2 { &w[..2] } else { return false };
    matches!(
        (p, suffix),
        ("be", "i")
            | ("di", "an")
            | ("ke", "i")
            | ("ke", "kan")
            | ("me", "an")
            | ("se", "i")
            | ("se", "kan")
    )
}

/// Strips one suffix from `set` (longest match wins), returning
/// `(removed, rest)`.
fn strip_one(w: &str, set: &[&str]) -> (String, String) {
    for s in set {
        if w.len() > s.len() && w.ends_with(s) {
            return (s.to_string(), w[..w.len() - s.len()].to_string());
        }
    }
    (String::new(), w.to_string())
}

fn strip_particle(w: &str) -> (String, String) {
    strip_one(w, &["lah", "kah", "tah", "pun"])
}

fn strip_possessive(w: &str) -> (String, String) {
    strip_one(w, &["nya", "ku", "mu"])
}

fn strip_suffix(w: &str) -> (String, String) {
    for s in ["kan", "an", "i"] {
        if w.len() > s.len() && w.ends_with(s) && !forbidden_pair(w, s) {
            return (s.to_string(), w[..w.len() - s.len()].to_string());
        }
    }
    (String::new(), w.to_string())
}

/// Result of one prefix-removal attempt.
struct PrefixStrip {
    /// Two-letter prefix family that was inspected.
    family: String,
    /// Word after the strip (or unchanged when nothing matched).
    result: String,
    /// Characters to try re-prepending (recoding candidates), in order.
    recodes: Vec<String>,
    /// Human-readable rule label.
    label: String,
}

fn remove_prefix_once(w: &str) -> PrefixStrip {
    let family = w[..2].to_string();
    let (result, recodes, label) = match family.as_str() {
        "di" | "ke" | "se" => (
            w[2..].to_string(),
            vec![],
            format!("strip prefix {family}-"),
        ),
        "me" => prefix_me(w),
        "pe" => prefix_pe(w),
        "be" => prefix_be(w),
        "te" => prefix_te(w),
        _ => prefix_infix(w),
    };
    PrefixStrip {
        family,
        result,
        recodes,
        label,
    }
}

fn no_strip(w: &str) -> (String, Vec<String>, String) {
    (w.to_string(), vec![], String::new())
}

fn strip_at(w: &str, n: usize, label: &str, recodes: &[&str]) -> (String, Vec<String>, String) {
    (
        w[n..].to_string(),
        recodes.iter().map(|s| s.to_string()).collect(),
        format!("strip prefix {label}-"),
    )
}

fn prefix_me(w: &str) -> (String, Vec<String>, String) {
    let b = w.as_bytes();
    let n = w.len();
    // me{l|r|w|y}V
    if n >= 4 && matches!(b[2], b'l' | b'r' | b'w' | b'y') && vowel(b[3]) {
        return strip_at(w, 2, "me", &[]);
    }
    // mem{b|f|v}
    if n >= 4 && b[2] == b'm' && matches!(b[3], b'b' | b'f' | b'v') {
        return strip_at(w, 3, "mem", &[]);
    }
    // mempe
    if n >= 5 && b[2] == b'm' && b[3] == b'p' && b[4] == b'e' {
        return strip_at(w, 3, "mem", &[]);
    }
    // mem{rV|V} with recoding to m-/p-
    if n >= 4 && b[2] == b'm' && (vowel(b[3]) || (n >= 5 && b[3] == b'r' && vowel(b[4]))) {
        return strip_at(w, 3, "mem", &["m", "p"]);
    }
    // men{c|d|j|s|t|z}
    if n >= 4 && b[2] == b'n' && matches!(b[3], b'c' | b'd' | b'j' | b's' | b't' | b'z') {
        return strip_at(w, 3, "men", &[]);
    }
    // menV with recoding to n-/t-
    if n >= 4 && b[2] == b'n' && vowel(b[3]) {
        return strip_at(w, 3, "men", &["n", "t"]);
    }
    // meng{g|h|q|k}
    if n >= 5 && b[2] == b'n' && b[3] == b'g' && matches!(b[4], b'g' | b'h' | b'q' | b'k') {
        return strip_at(w, 4, "meng", &[]);
    }
    // mengV; menge- strips whole, otherwise recodes ng-/k-
    if n >= 5 && b[2] == b'n' && b[3] == b'g' && vowel(b[4]) {
        if b[4] == b'e' {
            return strip_at(w, 5, "menge", &[]);
        }
        return strip_at(w, 4, "meng", &["ng", "k"]);
    }
    // menyV: meny- becomes ny- before a, s- otherwise
    if n >= 5 && b[2] == b'n' && b[3] == b'y' && vowel(b[4]) {
        let head = if b[4] == b'a' { "ny" } else { "s" };
        return (
            format!("{head}{}", &w[4..]),
            vec![],
            format!("strip prefix meny- ({head}- recoded)"),
        );
    }
    // mempA with A != 'e'
    if n >= 5 && b[2] == b'm' && b[3] == b'p' && b[4] != b'e' {
        return strip_at(w, 3, "mem", &[]);
    }
    no_strip(w)
}

fn prefix_pe(w: &str) -> (String, Vec<String>, String) {
    let b = w.as_bytes();
    let n = w.len();
    let cons_not_r = |x: u8| !vowel(x) && x != b'r';
    // pe{w|y}V
    if n >= 4 && matches!(b[2], b'w' | b'y') && vowel(b[3]) {
        return strip_at(w, 2, "pe", &[]);
    }
    // perV with recoding to r-
    if n >= 4 && b[2] == b'r' && vowel(b[3]) {
        return strip_at(w, 3, "per", &["r"]);
    }
    // perCA[^e]
    if n >= 6 && b[2] == b'r' && cons_not_r(b[3]) && b[4].is_ascii_lowercase() && b[5] != b'e' {
        return strip_at(w, 3, "per", &[]);
    }
    // perCAerV
    if n >= 8
        && b[2] == b'r'
        && cons_not_r(b[3])
        && b[4].is_ascii_lowercase()
        && b[5] == b'e'
        && b[6] == b'r'
        && vowel(b[7])
    {
        return strip_at(w, 3, "per", &[]);
    }
    // pem{b|f|v}
    if n >= 4 && b[2] == b'm' && matches!(b[3], b'b' | b'f' | b'v') {
        return strip_at(w, 3, "pem", &[]);
    }
    // pem{rV|V} with recoding to m-/p-
    if n >= 4 && b[2] == b'm' && (vowel(b[3]) || (n >= 5 && b[3] == b'r' && vowel(b[4]))) {
        return strip_at(w, 3, "pem", &["m", "p"]);
    }
    // pen{c|d|j|s|t|z}
    if n >= 4 && b[2] == b'n' && matches!(b[3], b'c' | b'd' | b'j' | b's' | b't' | b'z') {
        return strip_at(w, 3, "pen", &[]);
    }
    // penV with recoding to n-/t-
    if n >= 4 && b[2] == b'n' && vowel(b[3]) {
        return strip_at(w, 3, "pen", &["n", "t"]);
    }
    // pengC
    if n >= 5 && b[2] == b'n' && b[3] == b'g' && !vowel(b[4]) {
        return strip_at(w, 4, "peng", &[]);
    }
    // pengV; penge- strips whole, otherwise recodes k-
    if n >= 5 && b[2] == b'n' && b[3] == b'g' && vowel(b[4]) {
        if b[4] == b'e' {
            return strip_at(w, 5, "penge", &[]);
        }
        return strip_at(w, 4, "peng", &["k"]);
    }
    // penyV with recoding to s-/ny-
    if n >= 5 && b[2] == b'n' && b[3] == b'y' && vowel(b[4]) {
        return strip_at(w, 4, "peny", &["s", "ny"]);
    }
    // pelV (pelajar special-cased) with recoding to k-
    if n >= 4 && b[2] == b'l' && vowel(b[3]) {
        if w == "pelajar" {
            return ("ajar".to_string(), vec![], "strip prefix pel-".to_string());
        }
        return strip_at(w, 2, "pe", &["k"]);
    }
    let cons_excl = |x: u8| !vowel(x) && !matches!(x, b'r' | b'w' | b'y' | b'l' | b'm' | b'n');
    // peCerV keeps the consonant stripped
    if n >= 6 && cons_excl(b[2]) && b[3] == b'e' && b[4] == b'r' && vowel(b[5]) {
        return strip_at(w, 3, "pe", &[]);
    }
    // peC[^e]
    if n >= 4 && cons_excl(b[2]) && b[3] != b'e' {
        return strip_at(w, 2, "pe", &[]);
    }
    // peCerC
    if n >= 6 && cons_excl(b[2]) && b[3] == b'e' && b[4] == b'r' && !vowel(b[5]) {
        return strip_at(w, 2, "pe", &[]);
    }
    no_strip(w)
}

fn prefix_be(w: &str) -> (String, Vec<String>, String) {
    let b = w.as_bytes();
    let n = w.len();
    let cons_not_r = |x: u8| !vowel(x) && x != b'r';
    // berV with recoding to r-
    if n >= 4 && b[2] == b'r' && vowel(b[3]) {
        return strip_at(w, 3, "ber", &["r"]);
    }
    // berCA[^e]
    if n >= 6 && b[2] == b'r' && cons_not_r(b[3]) && b[4].is_ascii_lowercase() && b[5] != b'e' {
        return strip_at(w, 3, "ber", &[]);
    }
    // berCAerV
    if n >= 8
        && b[2] == b'r'
        && cons_not_r(b[3])
        && b[4].is_ascii_lowercase()
        && b[5] == b'e'
        && b[6] == b'r'
        && vowel(b[7])
    {
        return strip_at(w, 3, "ber", &[]);
    }
    // belajar
    if w == "belajar" {
        return ("ajar".to_string(), vec![], "strip prefix bel-".to_string());
    }
    // beCerC with C != r/l
    if n >= 6
        && !vowel(b[2])
        && !matches!(b[2], b'r' | b'l')
        && b[3] == b'e'
        && b[4] == b'r'
        && !vowel(b[5])
    {
        return strip_at(w, 2, "be", &[]);
    }
    no_strip(w)
}

fn prefix_te(w: &str) -> (String, Vec<String>, String) {
    let b = w.as_bytes();
    let n = w.len();
    let cons_not_r = |x: u8| !vowel(x) && x != b'r';
    // terV with recoding to r-
    if n >= 4 && b[2] == b'r' && vowel(b[3]) {
        return strip_at(w, 3, "ter", &["r"]);
    }
    // terCerV
    if n >= 7 && b[2] == b'r' && cons_not_r(b[3]) && b[4] == b'e' && b[5] == b'r' && vowel(b[6]) {
        return strip_at(w, 3, "ter", &[]);
    }
    // terC[^e]
    if n >= 5 && b[2] == b'r' && cons_not_r(b[3]) && b[4] != b'e' {
        return strip_at(w, 3, "ter", &[]);
    }
    // teCerC
    if n >= 6 && cons_not_r(b[2]) && b[3] == b'e' && b[4] == b'r' && !vowel(b[5]) {
        return strip_at(w, 2, "te", &[]);
    }
    // terCerC
    if n >= 7 && b[2] == b'r' && cons_not_r(b[3]) && b[4] == b'e' && b[5] == b'r' && !vowel(b[6]) {
        return strip_at(w, 3, "ter", &[]);
    }
    no_strip(w)
}

/// Infix handling for words whose first two letters are not a known prefix:
/// strips -er-/-el-/-em-/-in- after a leading consonant, offering the full
/// head and the bare consonant as recoding candidates.
fn prefix_infix(w: &str) -> (String, Vec<String>, String) {
    let b = w.as_bytes();
    let n = w.len();
    let matched = (n >= 4
        && !vowel(b[0])
        && b[1] == b'e'
        && matches!(b[2], b'r' | b'l' | b'm')
        && vowel(b[3]))
        || (n >= 4 && !vowel(b[0]) && b[1] == b'i' && b[2] == b'n' && vowel(b[3]));
    if matched {
        return (
            w[3..].to_string(),
            vec![w[..3].to_string(), w[..1].to_string()],
            format!("strip infix {}-", &w[1..3]),
        );
    }
    no_strip(w)
}

/// Outcome of the iterated prefix-removal loop.
struct PrefixOutcome {
    /// Dictionary root, when one was confirmed.
    root: Option<String>,
    /// Residual form after the strips that were carried out.
    residual: String,
    /// Trace of the strips leading to `root` / `residual`.
    steps: Vec<TraceStep>,
}

/// Removes up to three prefixes, checking the dictionary after each strip
/// and after each recoding candidate. Stops when fewer than three
/// characters remain (discarding partial strips, so the caller keeps the
/// word it passed in) or when the same two-letter prefix would repeat.
fn remove_prefixes(word: &str, dict: &RootDictionary) -> PrefixOutcome {
    let mut w = word.to_string();
    let mut last_family = String::new();
    let mut steps: Vec<TraceStep> = Vec::new();

    for _ in 0..3 {
        if w.len() < 3 {
            return PrefixOutcome {
                root: None,
                residual: word.to_string(),
                steps: vec![],
            };
        }
        if last_family == w[..2] {
            break;
        }
        let strip = remove_prefix_once(&w);
        last_family = strip.family;

        if strip.result != w {
            steps.push(TraceStep {
                rule: strip.label.clone(),
                form: strip.result.clone(),
            });
        }
        if dict.contains(&strip.result) {
            return PrefixOutcome {
                root: Some(strip.result),
                residual: w,
                steps,
            };
        }
        for rc in &strip.recodes {
            let cand = format!("{rc}{}", strip.result);
            if dict.contains(&cand) {
                steps.pop();
                steps.push(TraceStep {
                    rule: format!("{} ({rc}- recoded)", strip.label),
                    form: cand.clone(),
                });
                return PrefixOutcome {
                    root: Some(cand),
                    residual: w,
                    steps,
                };
            }
        }
        w = strip.result;
    }

    PrefixOutcome {
        root: None,
        residual: w,
        steps,
    }
}

/// Suffix material removed during the suffix phase, outermost first.
#[derive(Default)]
struct Removed {
    particle: String,
    possessive: String,
    suffix: String,
}

impl Removed {
    fn total_len(&self) -> usize {
        self.particle.len() + self.possessive.len() + self.suffix.len()
    }

    /// Restoration fragments in re-append order; -kan restores as k then an.
    fn fragments(&self) -> Vec<String> {
        let mut parts = Vec::new();
        if self.suffix == "kan" {
            parts.push("k".to_string());
            parts.push("an".to_string());
        } else if !self.suffix.is_empty() {
            parts.push(self.suffix.clone());
        }
        if !self.possessive.is_empty() {
            parts.push(self.possessive.clone());
        }
        if !self.particle.is_empty() {
            parts.push(self.particle.clone());
        }
        parts
    }

    fn describe(&self) -> String {
        let mut names = Vec::new();
        if !self.suffix.is_empty() {
            names.push(format!("-{}", self.suffix));
        }
        if !self.possessive.is_empty() {
            names.push(format!("-{}", self.possessive));
        }
        if !self.particle.is_empty() {
            names.push(format!("-{}", self.particle));
        }
        names.join(" ")
    }
}

/// Restoration pass: starting from the original word minus everything the
/// suffix phase removed, re-append fragments one at a time and retry prefix
/// removal on each candidate.
fn restore_suffixes(
    original: &str,
    removed: &Removed,
    dict: &RootDictionary,
) -> Option<(String, Vec<TraceStep>)> {
    let base = &original[..original.len() - removed.total_len()];
    let fragments = removed.fragments();

    for appended in 0..=fragments.len() {
        let mut steps = Vec::new();
        if removed.total_len() > 0 {
            steps.push(TraceStep {
                rule: format!("strip suffixes {}", removed.describe()),
                form: base.to_string(),
            });
        }
        let mut candidate = base.to_string();
        for frag in fragments.iter().take(appended) {
            candidate.push_str(frag);
            steps.push(TraceStep {
                rule: format!("restore -{frag}"),
                form: candidate.clone(),
            });
        }

        if dict.contains(&candidate) {
            return Some((candidate, steps));
        }
        let outcome = remove_prefixes(&candidate, dict);
        if let Some(root) = outcome.root {
            steps.extend(outcome.steps);
            return Some((root, steps));
        }
    }
    None
}

/// Core algorithm past the trivial dictionary/length checks.
fn stem_engine(word: &str, dict: &RootDictionary) -> Option<(String, Vec<TraceStep>)> {
    let mut removed = Removed::default();
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut w = word.to_string();

    if prefix_first(word) {
        let outcome = remove_prefixes(&w, dict);
        if let Some(root) = outcome.root {
            steps.extend(outcome.steps);
            return Some((root, steps));
        }
        steps.extend(outcome.steps);
        w = outcome.residual;

        if let Some(hit) = suffix_phase(&mut w, &mut removed, &mut steps, dict) {
            return Some((hit, steps));
        }
    } else {
        if let Some(hit) = suffix_phase(&mut w, &mut removed, &mut steps, dict) {
            return Some((hit, steps));
        }
        let outcome = remove_prefixes(&w, dict);
        if let Some(root) = outcome.root {
            steps.extend(outcome.steps);
            return Some((root, steps));
        }
    }

    restore_suffixes(word, &removed, dict)
}

/// Splits one affix off a word, returning `(taken, rest)`.
type StripFn = fn(&str) -> (String, String);

/// Particle, possessive, then derivational suffix, with a dictionary check
/// after each strip. Returns the root on a hit; `w` and `removed` keep the
/// phase's progress either way.
fn suffix_phase(
    w: &mut String,
    removed: &mut Removed,
    steps: &mut Vec<TraceStep>,
    dict: &RootDictionary,
) -> Option<String> {
    let phases: [(&str, StripFn); 3] = [
        ("particle", strip_particle),
        ("possessive", strip_possessive),
        ("suffix", strip_suffix),
    ];
    for (kind, strip) in phases {
        let (taken, rest) = strip(w);
        if taken.is_empty() {
            continue;
        }
        match kind {
            "particle" => removed.particle = taken.clone(),
            "possessive" => removed.possessive = taken.clone(),
            _ => removed.suffix = taken.clone(),
        }
        steps.push(TraceStep {
            rule: format!("strip {kind} -{taken}"),
            form: rest.clone(),
        });
        *w = rest;
        if dict.contains(w) {
            return Some(w.clone());
        }
    }
    None
}
