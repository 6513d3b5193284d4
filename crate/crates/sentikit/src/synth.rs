//! Deterministic generator for a synthetic Indonesian app-review corpus.
//!
//! The bundled 10,000-review dataset is produced by this module and
//! committed; regenerating with the default spec reproduces it byte for
//! byte. Reviews carry informal texture (slang, elongations, casing,
//! URLs/mentions/hashtags, stray punctuation) that the preprocessing
//! pipeline is expected to strip.
//!
//! Label semantics: every review contains one or two sentiment keywords and
//! the class of the LAST keyword in reading order is the label. A tunable
//! share of reviews also carries one earlier keyword from a different class,
//! so their bags of words are ambiguous and only word order resolves them —
//! sequence models can beat bag-of-words models on exactly that share.

use std::path::Path;

use crate::corpus::{LabeledCorpus, Review, Sentiment};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Generation settings. Counts are per class in `Sentiment` index order.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub counts: [usize; 3],
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> SynthSpec {
        SynthSpec {
            counts: [6747, 2373, 880],
            seed: 42,
        }
    }
}

/// Share of reviews whose bag of words is cross-class ambiguous.
const P_MIXED: f64 = 0.45;
/// Share of reviews carrying a burst of one repeated topic word.
const P_BURST: f64 = 0.18;
const P_JUNK: f64 = 0.08;
const P_NOISE: f64 = 0.35;
const P_INTENSIFIER: f64 = 0.22;
const P_SECOND_KEYWORD: f64 = 0.45;
const P_OPENER: f64 = 0.5;
const P_CLOSER: f64 = 0.35;
const P_CAPS_KEYWORD: f64 = 0.08;
const P_CAPITALIZE: f64 = 0.7;
const P_END_PUNCT: f64 = 0.55;
const P_COMMA: f64 = 0.2;

/// Raw surface variants per keyword; every surface normalizes to the same
/// root through the pipeline (slang table, elongation collapse, stemming).
const NEG_KEYWORDS: &[&[&str]] = &[
    &["jelek", "jeleeek"],
    &["buruk"],
    &["lambat", "lemot", "lambaaat"],
    &["parah", "parahhh"],
    &["rusak"],
    &["kecewa", "kecewaaa"],
    &["macet"],
    &["sampah"],
    &["bosan", "bosaaan"],
    &["lag", "ngelag"],
    &["gagal"],
    &["kesal"],
    &["payah"],
];

const POS_KEYWORDS: &[&[&str]] = &[
    &["bagus", "bgs", "bagusss", "bagusnya"],
    &["keren", "kereeen"],
    &["mantap", "mantul", "mantaaap"],
    &["seru", "seruuu"],
    &["puas"],
    &["lancar"],
    &["hebat"],
    &["asyik"],
    &["nyaman"],
    &["senang", "menyenangkan"],
    &["cepat"],
    &["juara"],
    &["suka"],
];

const NEU_KEYWORDS: &[&[&str]] = &[
    &["lumayan", "lumayaaan"],
    &["standar"],
    &["normal"],
    &["netral"],
    &["rata"],
    &["sederhana"],
    &["umum"],
];

/// Roots the keywords above reduce to, per class, for label verification.
const NEG_ROOTS: &[&str] = &[
    "jelek", "buruk", "lambat", "parah", "rusak", "kecewa", "macet", "sampah", "bosan", "lag",
    "gagal", "kesal", "payah",
];
const POS_ROOTS: &[&str] = &[
    "bagus", "keren", "mantap", "seru", "puas", "lancar", "hebat", "asyik", "nyaman", "senang",
    "cepat", "juara", "suka",
];
const NEU_ROOTS: &[&str] = &[
    "lumayan",
    "standar",
    "normal",
    "netral",
    "rata",
    "sederhana",
    "umum",
];

/// Topic fillers used by every class.
const COMMON_FILLERS: &[&str] = &[
    "game", "gamenya", "aplikasi", "main", "level", "karakter", "fitur", "versi", "mode", "akun",
    "misi", "peta", "item", "koin", "senjata", "tampilan", "kontrol", "suara", "event", "hadiah",
    "download", "online", "offline", "banget", "bintang",
];

/// Fillers that lean toward one class in pure reviews (mixed reviews never
/// use them, so they cannot resolve the order ambiguity).
const NEG_FILLERS: &[&str] = &[
    "koneksi", "server", "login", "baterai", "iklan", "memori", "sinyal",
];
const POS_FILLERS: &[&str] = &[
    "grafik",
    "grafiknya",
    "musik",
    "cerita",
    "desain",
    "animasi",
    "efek",
];
const NEU_FILLERS: &[&str] = &["update", "ranking", "lawan", "turnamen"];

/// Multi-word phrases whose content words are class-agnostic.
const OPENERS: &[&str] = &[
    "game ini",
    "aplikasi ini",
    "menurut saya",
    "jujur aja",
    "baru download kemarin",
    "udah lama main game ini",
    "setelah update terbaru",
    "pertama kali main",
];

const CLOSERS: &[&str] = &[
    "sekian review dari saya",
    "semoga membantu",
    "itu aja sih",
    "terima kasih",
    "sekian",
];

/// Words that vanish in preprocessing (stopwords or slang of stopwords).
const VANISHING: &[&str] = &[
    "yang", "ini", "itu", "saya", "sy", "aku", "dan", "di", "ke", "dari", "untuk", "dengan", "dgn",
    "juga", "jg", "sudah", "udah", "masih", "tidak", "ga", "gk", "tdk", "tapi", "kalau", "bisa",
    "karena", "krn", "sangat", "sekali", "aja",
];

const URLS: &[&str] = &[
    "https://bit.ly/3xGm2",
    "www.tokopedia.com",
    "http://s.id/q1w2",
];
const MENTIONS: &[&str] = &["@devgame", "@adminapp", "@cs_bantuan"];
const HASHTAGS: &[&str] = &["#gamer", "#mobilegame", "#reviewjujur"];
const NUMBERS: &[&str] = &["1", "3", "5", "10", "100", "2024"];
const PUNCT_BLOBS: &[&str] = &["!!!", "...", "?!", ":v", ":)"];
const END_PUNCT: &[&str] = &[".", "!", "!!", "!!!", "...", "?"];

fn chance(rng: &mut Rng, p: f64) -> bool {
    rng.next_f64() < p
}

fn pick<'t>(rng: &mut Rng, xs: &[&'t str]) -> &'t str {
    xs[rng.index(xs.len())]
}

fn keyword_pool(class: Sentiment) -> &'static [&'static [&'static str]] {
    match class {
        Sentiment::Negative => NEG_KEYWORDS,
        Sentiment::Positive => POS_KEYWORDS,
        Sentiment::Neutral => NEU_KEYWORDS,
    }
}

fn leaning_pool(class: Sentiment) -> &'static [&'static str] {
    match class {
        Sentiment::Negative => NEG_FILLERS,
        Sentiment::Positive => POS_FILLERS,
        Sentiment::Neutral => NEU_FILLERS,
    }
}

/// Class of a post-pipeline root, if it is a sentiment keyword.
pub fn keyword_class(root: &str) -> Option<Sentiment> {
    if NEG_ROOTS.contains(&root) {
        Some(Sentiment::Negative)
    } else if POS_ROOTS.contains(&root) {
        Some(Sentiment::Positive)
    } else if NEU_ROOTS.contains(&root) {
        Some(Sentiment::Neutral)
    } else {
        None
    }
}

fn keyword_surface(rng: &mut Rng, class: Sentiment) -> String {
    let pool = keyword_pool(class);
    let surfaces = pool[rng.index(pool.len())];
    let surface = surfaces[rng.index(surfaces.len())];
    if chance(rng, P_CAPS_KEYWORD) {
        surface.to_uppercase()
    } else {
        surface.to_string()
    }
}

fn distractor_class(rng: &mut Rng, label: Sentiment) -> Sentiment {
    let others: Vec<Sentiment> = Sentiment::ALL.into_iter().filter(|c| *c != label).collect();
    others[rng.index(2)]
}

fn push_phrase(tokens: &mut Vec<String>, phrase: &str) {
    for w in phrase.split_whitespace() {
        tokens.push(w.to_string());
    }
}

fn junk_token(rng: &mut Rng) -> String {
    let len = 5 + rng.index(5);
    (0..len)
        .map(|_| (b'a' + rng.index(26) as u8) as char)
        .collect()
}

fn build_doc(rng: &mut Rng, label: Sentiment) -> String {
    let mut tokens: Vec<String> = Vec::new();
    if chance(rng, P_OPENER) {
        push_phrase(&mut tokens, pick(rng, OPENERS));
    }

    let mixed = chance(rng, P_MIXED);
    let lean = leaning_pool(label);
    let push_fillers = |tokens: &mut Vec<String>, rng: &mut Rng, max: usize, allow_lean: bool| {
        for _ in 0..rng.index(max + 1) {
            let w = if allow_lean && chance(rng, 0.5) {
                pick(rng, lean)
            } else {
                pick(rng, COMMON_FILLERS)
            };
            tokens.push(w.to_string());
        }
    };
    let push_keyword = |tokens: &mut Vec<String>, rng: &mut Rng, class: Sentiment| {
        tokens.push(keyword_surface(rng, class));
        if chance(rng, P_INTENSIFIER) {
            tokens.push("banget".to_string());
        }
    };

    if mixed {
        let d = distractor_class(rng, label);
        push_fillers(&mut tokens, rng, 2, false);
        push_keyword(&mut tokens, rng, d);
        push_fillers(&mut tokens, rng, 2, false);
        push_keyword(&mut tokens, rng, label);
        push_fillers(&mut tokens, rng, 1, false);
    } else {
        push_fillers(&mut tokens, rng, 2, true);
        push_keyword(&mut tokens, rng, label);
        if chance(rng, P_SECOND_KEYWORD) {
            push_fillers(&mut tokens, rng, 2, true);
            push_keyword(&mut tokens, rng, label);
        }
        push_fillers(&mut tokens, rng, 1, true);
    }

    // Function-word sprinkles at random positions; these vanish in
    // preprocessing so they never disturb the keyword order.
    for _ in 0..1 + rng.index(4) {
        let at = rng.index(tokens.len() + 1);
        tokens.insert(at, pick(rng, VANISHING).to_string());
    }

    if chance(rng, P_BURST) {
        let pools = [NEG_FILLERS, POS_FILLERS, NEU_FILLERS];
        let pool = pools[rng.index(3)];
        let w = pick(rng, pool);
        let at = rng.index(tokens.len() + 1);
        let reps = 3 + rng.index(3);
        for _ in 0..reps {
            tokens.insert(at, w.to_string());
        }
    }

    if chance(rng, P_JUNK) {
        let at = rng.index(tokens.len() + 1);
        let junk = junk_token(rng);
        tokens.insert(at, junk);
    }

    if chance(rng, P_NOISE) {
        let blob = match rng.index(5) {
            0 => pick(rng, URLS),
            1 => pick(rng, MENTIONS),
            2 => pick(rng, HASHTAGS),
            3 => pick(rng, NUMBERS),
            _ => pick(rng, PUNCT_BLOBS),
        };
        let at = rng.index(tokens.len() + 1);
        tokens.insert(at, blob.to_string());
    }

    if chance(rng, P_CLOSER) {
        push_phrase(&mut tokens, pick(rng, CLOSERS));
    }

    if chance(rng, P_COMMA) {
        let at = rng.index(tokens.len());
        tokens[at].push(',');
    }

    let mut text = tokens.join(" ");
    if chance(rng, P_CAPITALIZE) {
        let mut chars = text.chars();
        if let Some(first) = chars.next() {
            text = first.to_uppercase().collect::<String>() + chars.as_str();
        }
    }
    if chance(rng, P_END_PUNCT) {
        text.push_str(pick(rng, END_PUNCT));
    }
    text
}

/// Generates the corpus: exact per-class counts, one PRNG stream per class,
/// and a final seeded shuffle of record order.
pub fn generate(spec: &SynthSpec) -> LabeledCorpus {
    let mut master = Rng::new(spec.seed);
    let mut records = Vec::with_capacity(spec.counts.iter().sum());
    for class in Sentiment::ALL {
        let mut rng = master.fork();
        for _ in 0..spec.counts[class.index()] {
            records.push(Review {
                text: build_doc(&mut rng, class),
                label: class,
            });
        }
    }
    master.shuffle(&mut records);
    LabeledCorpus::from_records(records)
}

/// Renders the corpus as a semicolon-delimited CSV with a `review;sentiment`
/// header.
pub fn to_csv_bytes(corpus: &LabeledCorpus) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(b';')
        .from_writer(Vec::new());
    w.write_record(["review", "sentiment"]).expect("vec write");
    for r in corpus.records() {
        w.write_record([r.text.as_str(), r.label.name()])
            .expect("vec write");
    }
    w.into_inner().expect("vec writer never errors")
}

/// Writes the CSV atomically (temp file + rename).
pub fn write_csv(corpus: &LabeledCorpus, path: &Path) -> Result<()> {
    let bytes = to_csv_bytes(corpus);
    let tmp = path.with_extension("csv.tmp");
    std::fs::write(&tmp, &bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{load_csv, CsvOptions};
    use crate::preprocess::{run_pipeline, PipelineConfig};
    use crate::stemmer::RootDictionary;

    fn small_spec() -> SynthSpec {
        SynthSpec {
            counts: [135, 47, 18],
            seed: 7,
        }
    }

    #[test]
    fn exact_counts_and_determinism() {
        let spec = small_spec();
        let a = generate(&spec);
        assert_eq!(a.counts(), spec.counts);
        assert_eq!(a.n(), 200);
        let b = generate(&spec);
        for (x, y) in a.records().iter().zip(b.records()) {
            assert_eq!(x, y);
        }
        let c = generate(&SynthSpec { seed: 8, ..spec });
        assert!(a.records().iter().zip(c.records()).any(|(x, y)| x != y));
    }

    #[test]
    fn csv_round_trips_through_the_loader() {
        let corpus = generate(&small_spec());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("synth.csv");
        write_csv(&corpus, &path).unwrap();
        let (loaded, skipped) = load_csv(&path, &CsvOptions::default()).unwrap();
        assert_eq!(skipped, 0);
        assert_eq!(loaded.n(), corpus.n());
        assert_eq!(loaded.counts(), corpus.counts());
        for (a, b) in corpus.records().iter().zip(loaded.records()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn labels_match_the_last_keyword_rule() {
        let corpus = generate(&small_spec());
        let cfg = PipelineConfig::vendored();
        let dict = RootDictionary::vendored();
        for r in corpus.records() {
            let tokens = run_pipeline(&r.text, &cfg, dict);
            assert!(
                !tokens.is_empty(),
                "review reduced to nothing: {:?}",
                r.text
            );
            let last = tokens
                .iter()
                .rev()
                .find_map(|t| keyword_class(t))
                .unwrap_or_else(|| panic!("no keyword survived in {:?} -> {tokens:?}", r.text));
            assert_eq!(last, r.label, "review {:?} -> {tokens:?}", r.text);
        }
    }

    #[test]
    fn corpus_has_informal_texture() {
        let corpus = generate(&SynthSpec {
            counts: [400, 150, 50],
            seed: 3,
        });
        let all: Vec<&str> = corpus.records().iter().map(|r| r.text.as_str()).collect();
        assert!(all.iter().any(|t| t.contains("http") || t.contains("www.")));
        assert!(all.iter().any(|t| t.contains('@')));
        assert!(all.iter().any(|t| t.contains('#')));
        assert!(all.iter().any(|t| t.contains("!!!")));
        assert!(all.iter().any(|t| t.chars().any(|c| c.is_ascii_digit())));
        assert!(all.iter().any(|t| t.chars().any(|c| c.is_uppercase())));
        // Elongations and slang that the pipeline must normalize.
        assert!(all
            .iter()
            .any(|t| t.contains("uuu") || t.contains("eee") || t.contains("aaa")));
        assert!(all
            .iter()
            .any(|t| t.contains("lemot") || t.contains("mantul") || t.contains("bgs")));
    }

    #[test]
    fn default_spec_matches_reference_distribution() {
        let spec = SynthSpec::default();
        assert_eq!(spec.counts.iter().sum::<usize>(), 10_000);
        assert_eq!(spec.counts, [6747, 2373, 880]);
    }
}
