//! Command implementations: everything between argument parsing and the
//! library calls, including artifact writing.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use sentikit::classifiers::{train_lr, train_nb, train_rf};
use sentikit::corpus::{
    class_distribution, load_csv, stratified_kfold, stratified_split, LabeledCorpus, Sentiment,
    SplitSpec,
};
use sentikit::error::{Error, Result};
use sentikit::eval::{
    cv_aggregate, leaderboard, leaderboard_csv, leaderboard_text, metrics, ConfusionMatrix,
    CvSummary, EvalReport, LeaderboardRow, MetricSet,
};
use sentikit::features::{encode_seq, IdfVariant, SparseVector, TfIdfModel, Vocabulary};
use sentikit::lstm::{forward, train as train_lstm, EpochLog, LstmParams, Mode};
use sentikit::model_file::{pack, unpack, Algo, AnyModel, ModelFile};
use sentikit::preprocess::{run_pipeline, PipelineConfig, TokenSeq};
use sentikit::rng::Rng;
use sentikit::stemmer::{stem, stem_trace, RootDictionary};
use sentikit::synth::{self, SynthSpec};

use crate::config::RunConfig;

fn ensure_parent_dir(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    Ok(())
}

/// Writes a file atomically: temp sibling, then rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    ensure_parent_dir(path)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn load_corpus(cfg: &RunConfig) -> Result<LabeledCorpus> {
    let path = cfg.dataset_path()?;
    let opts = cfg.csv_options()?;
    let (corpus, skipped) = load_csv(&path, &opts)?;
    if skipped > 0 {
        eprintln!("note: skipped {skipped} empty rows");
    }
    Ok(corpus)
}

fn pipeline_config(cfg: &RunConfig) -> PipelineConfig {
    let mut pc = PipelineConfig::vendored();
    pc.max_tokens = cfg.pipeline.max_tokens;
    pc
}

fn preprocess_corpus(corpus: &LabeledCorpus, pc: &PipelineConfig) -> Vec<TokenSeq> {
    let dict = RootDictionary::vendored();
    corpus
        .records()
        .iter()
        .map(|r| run_pipeline(&r.text, pc, dict))
        .collect()
}

fn labels(corpus: &LabeledCorpus) -> Vec<Sentiment> {
    corpus.records().iter().map(|r| r.label).collect()
}

fn class_prior(corpus: &LabeledCorpus) -> [f64; 3] {
    let n = corpus.n() as f64;
    let counts = corpus.counts();
    [
        counts[0] as f64 / n,
        counts[1] as f64 / n,
        counts[2] as f64 / n,
    ]
}

fn argmax3(v: &[f64; 3]) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

/// Everything a training command needs, computed once per split.
struct FitData {
    train: LabeledCorpus,
    test_tokens: Vec<TokenSeq>,
    tfidf: TfIdfModel,
    x_train: Vec<SparseVector>,
    x_test: Vec<SparseVector>,
    y_train: Vec<Sentiment>,
    y_test: Vec<Sentiment>,
    prior: [f64; 3],
}

fn prepare_split(cfg: &RunConfig, train: LabeledCorpus, test: LabeledCorpus) -> Result<FitData> {
    let pc = pipeline_config(cfg);
    let train_tokens = preprocess_corpus(&train, &pc);
    let test_tokens = preprocess_corpus(&test, &pc);
    let tfidf = TfIdfModel::fit(&train_tokens, cfg.features.min_freq, cfg.idf_variant()?)?;
    let x_train = tfidf.vectorize_all(&train_tokens);
    let x_test = tfidf.vectorize_all(&test_tokens);
    let y_train = labels(&train);
    let y_test = labels(&test);
    let prior = class_prior(&train);
    Ok(FitData {
        train,
        test_tokens,
        tfidf,
        x_train,
        x_test,
        y_train,
        y_test,
        prior,
    })
}

fn prepare(cfg: &RunConfig) -> Result<FitData> {
    let corpus = load_corpus(cfg)?;
    let (train, test) = stratified_split(&corpus, &cfg.split_spec())?;
    prepare_split(cfg, train, test)
}

/// Encodes token sequences for the LSTM, dropping any that end up with no
/// real tokens (the network cannot consume them).
fn encode_set(
    tokens: &[TokenSeq],
    y: &[Sentiment],
    vocab: &Vocabulary,
    l: usize,
) -> (Vec<(sentikit::features::PaddedSeq, Sentiment)>, usize) {
    let mut set = Vec::with_capacity(tokens.len());
    let mut dropped = 0;
    for (t, &label) in tokens.iter().zip(y) {
        let seq = encode_seq(t, vocab, l);
        if seq.true_len == 0 {
            dropped += 1;
        } else {
            set.push((seq, label));
        }
    }
    (set, dropped)
}

fn train_one(algo: Algo, cfg: &RunConfig, fit: &FitData) -> Result<(AnyModel, Vec<EpochLog>)> {
    match algo {
        Algo::Nb => Ok((
            AnyModel::Nb(train_nb(&fit.x_train, &fit.y_train, cfg.nb.alpha)?),
            Vec::new(),
        )),
        Algo::Lr => Ok((
            AnyModel::Lr(train_lr(&fit.x_train, &fit.y_train, &cfg.lr_config())?),
            Vec::new(),
        )),
        Algo::Rf => Ok((
            AnyModel::Rf(train_rf(&fit.x_train, &fit.y_train, &cfg.rf_config())?),
            Vec::new(),
        )),
        Algo::Lstm => {
            let pc = pipeline_config(cfg);
            let val_fraction = cfg.lstm.val_fraction.clamp(0.0, 0.5);
            let (fit_part, val_part) = if val_fraction > 0.0 {
                stratified_split(
                    &fit.train,
                    &SplitSpec {
                        train_ratio: 1.0 - val_fraction,
                        seed: cfg.seed,
                        k: cfg.split.k,
                    },
                )?
            } else {
                (fit.train.clone(), LabeledCorpus::from_records(Vec::new()))
            };
            let fit_tokens = preprocess_corpus(&fit_part, &pc);
            let val_tokens = preprocess_corpus(&val_part, &pc);
            let (train_set, d1) = encode_set(
                &fit_tokens,
                &labels(&fit_part),
                &fit.tfidf.vocab,
                pc.max_tokens,
            );
            let (val_set, d2) = encode_set(
                &val_tokens,
                &labels(&val_part),
                &fit.tfidf.vocab,
                pc.max_tokens,
            );
            if d1 + d2 > 0 {
                eprintln!(
                    "note: dropped {} sequences with no tokens after preprocessing",
                    d1 + d2
                );
            }
            let mut rng = Rng::new(cfg.seed);
            let params =
                LstmParams::init(fit.tfidf.vocab.len(), cfg.lstm.d, cfg.lstm.h, 3, &mut rng);
            let (params, logs) = train_lstm(&train_set, &val_set, params, &cfg.lstm_config())?;
            Ok((AnyModel::Lstm(params), logs))
        }
    }
}

/// Test-set predictions as class indices, in corpus order.
fn predict_test(model: &AnyModel, cfg: &RunConfig, fit: &FitData) -> Result<Vec<usize>> {
    match model {
        AnyModel::Nb(m) => fit
            .x_test
            .iter()
            .map(|x| Ok(m.predict(x)?.label.index()))
            .collect(),
        AnyModel::Lr(m) => fit
            .x_test
            .iter()
            .map(|x| Ok(m.predict(x)?.label.index()))
            .collect(),
        AnyModel::Rf(m) => fit
            .x_test
            .iter()
            .map(|x| Ok(m.predict(x)?.label.index()))
            .collect(),
        AnyModel::Lstm(params) => {
            let l = cfg.pipeline.max_tokens;
            fit.test_tokens
                .iter()
                .map(|tokens| {
                    let seq = encode_seq(tokens, &fit.tfidf.vocab, l);
                    if seq.true_len == 0 {
                        return Ok(argmax3(&fit.prior));
                    }
                    let (probs, _) = forward(&seq, params, Mode::Infer)?;
                    let mut best = 0;
                    for i in 1..probs.len() {
                        if probs[i] > probs[best] {
                            best = i;
                        }
                    }
                    Ok(best)
                })
                .collect()
        }
    }
}

fn eval_on_test(
    model: &AnyModel,
    cfg: &RunConfig,
    fit: &FitData,
) -> Result<(ConfusionMatrix, MetricSet)> {
    let y_pred = predict_test(model, cfg, fit)?;
    let y_true: Vec<usize> = fit.y_test.iter().map(|&l| l.index()).collect();
    let cm = ConfusionMatrix::from_labels(&y_true, &y_pred, Sentiment::COUNT)?;
    let m = metrics(&cm)?;
    Ok((cm, m))
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn base_meta(algo: Algo, cfg: &RunConfig, fit: &FitData) -> BTreeMap<String, String> {
    let mut meta = BTreeMap::new();
    meta.insert("model".into(), algo.name().to_string());
    meta.insert("seed".into(), cfg.seed.to_string());
    meta.insert("train_ratio".into(), fmt_f64(cfg.split.train_ratio));
    meta.insert("max_tokens".into(), cfg.pipeline.max_tokens.to_string());
    meta.insert("min_freq".into(), cfg.features.min_freq.to_string());
    meta.insert("idf".into(), cfg.features.idf.clone());
    meta.insert("n_docs".into(), fit.tfidf.n_docs.to_string());
    meta.insert(
        "class_prior".into(),
        format!(
            "{},{},{}",
            fmt_f64(fit.prior[0]),
            fmt_f64(fit.prior[1]),
            fmt_f64(fit.prior[2])
        ),
    );
    match algo {
        Algo::Nb => {
            meta.insert("alpha".into(), fmt_f64(cfg.nb.alpha));
        }
        Algo::Lr => {
            meta.insert("lr".into(), fmt_f64(cfg.lr.lr));
            meta.insert("epochs".into(), cfg.lr.epochs.to_string());
            meta.insert("batch".into(), cfg.lr.batch.to_string());
            meta.insert("l2".into(), fmt_f64(cfg.lr.l2));
            meta.insert("tol".into(), fmt_f64(cfg.lr.tol));
        }
        Algo::Rf => {
            meta.insert("n_trees".into(), cfg.rf.n_trees.to_string());
            meta.insert("max_depth".into(), cfg.rf.max_depth.to_string());
            meta.insert("bootstrap".into(), cfg.rf.bootstrap.to_string());
        }
        Algo::Lstm => {
            meta.insert("d".into(), cfg.lstm.d.to_string());
            meta.insert("h".into(), cfg.lstm.h.to_string());
            meta.insert("lr".into(), fmt_f64(cfg.lstm.lr));
            meta.insert("batch".into(), cfg.lstm.batch.to_string());
            meta.insert("epochs".into(), cfg.lstm.epochs.to_string());
            meta.insert("dropout".into(), fmt_f64(cfg.lstm.dropout));
            meta.insert("val_fraction".into(), fmt_f64(cfg.lstm.val_fraction));
            meta.insert(
                "clip".into(),
                cfg.lstm.clip.map_or_else(|| "none".into(), fmt_f64),
            );
        }
    }
    meta
}

fn vocab_pairs(tfidf: &TfIdfModel) -> Vec<(String, usize)> {
    (0..tfidf.vocab.len())
        .map(|id| {
            let token = tfidf.vocab.token(id).expect("id in range").to_string();
            (token, tfidf.df[id])
        })
        .collect()
}

/// Trains, evaluates, and writes every artifact for one model. Returns the
/// leaderboard row.
fn train_eval_persist(algo: Algo, cfg: &RunConfig, fit: &FitData) -> Result<LeaderboardRow> {
    let (model, logs) = train_one(algo, cfg, fit)?;
    let (cm, m) = eval_on_test(&model, cfg, fit)?;
    let out = &cfg.output.dir;
    let name = algo.name();
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let file = pack(&model, vocab_pairs(&fit.tfidf), base_meta(algo, cfg, fit));
    file.save(&out.join(format!("model_{name}.skm")))?;

    let class_names: Vec<&str> = Sentiment::ALL.iter().map(|c| c.name()).collect();
    let report = EvalReport {
        model: name.to_string(),
        class_names: class_names.iter().map(|s| s.to_string()).collect(),
        confusion: cm.clone(),
        metrics: m.clone(),
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::InvalidConfig(format!("serializing report: {e}")))?;
    write_atomic(&out.join(format!("eval_{name}.json")), json.as_bytes())?;
    write_atomic(
        &out.join(format!("confusion_{name}.csv")),
        cm.to_csv(&class_names).as_bytes(),
    )?;

    if algo == Algo::Lstm {
        let mut csv = String::from(EpochLog::CSV_HEADER);
        csv.push('\n');
        for log in &logs {
            csv.push_str(&log.csv_row());
            csv.push('\n');
        }
        write_atomic(&out.join("epochs_lstm.csv"), csv.as_bytes())?;
    }

    Ok(LeaderboardRow::from_metrics(name, &m))
}

pub fn cmd_stats(cfg: &RunConfig, json: bool) -> Result<()> {
    let corpus = load_corpus(cfg)?;
    let dist = class_distribution(&corpus)?;
    if json {
        let text = serde_json::to_string_pretty(&dist)
            .map_err(|e| Error::InvalidConfig(format!("serializing stats: {e}")))?;
        println!("{text}");
    } else {
        println!("{:<10} {:>7} {:>7}", "class", "count", "pct");
        for c in Sentiment::ALL {
            let stat = &dist.classes[c.name()];
            println!("{:<10} {:>7} {:>7.2}", c.name(), stat.count, stat.pct);
        }
        println!("{:<10} {:>7}", "total", dist.total);
    }
    Ok(())
}

pub fn cmd_preprocess(
    cfg: &RunConfig,
    input: Option<&Path>,
    output: Option<&Path>,
    text: Option<&str>,
    json: bool,
) -> Result<()> {
    let pc = pipeline_config(cfg);
    let dict = RootDictionary::vendored();
    match (text, input) {
        (Some(t), None) => {
            let tokens = run_pipeline(t, &pc, dict);
            if json {
                println!(
                    "{}",
                    serde_json::to_string(&tokens)
                        .map_err(|e| Error::InvalidConfig(format!("serializing tokens: {e}")))?
                );
            } else {
                println!("{}", tokens.join(" "));
            }
            Ok(())
        }
        (None, Some(path)) => {
            let out = output.ok_or_else(|| {
                Error::InvalidConfig("preprocess --in requires --out FILE".into())
            })?;
            let opts = cfg.csv_options()?;
            let (corpus, skipped) = load_csv(path, &opts)?;
            if skipped > 0 {
                eprintln!("note: skipped {skipped} empty rows");
            }
            let mut lines = String::new();
            for record in corpus.records() {
                let tokens = run_pipeline(&record.text, &pc, dict);
                lines.push_str(
                    &serde_json::to_string(&tokens)
                        .map_err(|e| Error::InvalidConfig(format!("serializing tokens: {e}")))?,
                );
                lines.push('\n');
            }
            write_atomic(out, lines.as_bytes())?;
            println!("wrote {} token lines to {}", corpus.n(), out.display());
            Ok(())
        }
        (Some(_), Some(_)) => Err(Error::InvalidConfig(
            "preprocess takes either --text or --in, not both".into(),
        )),
        (None, None) => Err(Error::InvalidConfig(
            "preprocess needs --text TEXT or --in FILE".into(),
        )),
    }
}

pub fn cmd_train(cfg: &RunConfig, model: &str, json: bool) -> Result<()> {
    let algo = Algo::from_name(model)?;
    let fit = prepare(cfg)?;
    let row = train_eval_persist(algo, cfg, &fit)?;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "model": row.name,
                "accuracy": row.accuracy,
                "weighted_precision": row.precision,
                "weighted_recall": row.recall,
                "weighted_f1": row.f1,
                "out_dir": cfg.output.dir,
            }))
            .map_err(|e| Error::InvalidConfig(format!("serializing summary: {e}")))?
        );
    } else {
        println!(
            "{}: accuracy {:.4}, weighted F1 {:.4} (artifacts in {})",
            row.name,
            row.accuracy,
            row.f1,
            cfg.output.dir.display()
        );
    }
    Ok(())
}

fn parse_models(models: &str) -> Result<Vec<Algo>> {
    let mut algos = Vec::new();
    for name in models.split(',') {
        let name = name.trim();
        if name.is_empty() {
            continue;
        }
        let algo = Algo::from_name(name)?;
        if !algos.contains(&algo) {
            algos.push(algo);
        }
    }
    if algos.is_empty() {
        return Err(Error::InvalidConfig("no models selected".into()));
    }
    Ok(algos)
}

/// One cross-validation pass for one model: trains on each fold's train
/// part, evaluates on its held-out part, aggregates mean ± std.
fn cross_validate(algo: Algo, cfg: &RunConfig, corpus: &LabeledCorpus) -> Result<CvSummary> {
    let folds = stratified_kfold(corpus, &cfg.split_spec())?;
    let mut fold_metrics = Vec::with_capacity(folds.len());
    for (train, test) in folds {
        let fit = prepare_split(cfg, train, test)?;
        let (model, _) = train_one(algo, cfg, &fit)?;
        let (_, m) = eval_on_test(&model, cfg, &fit)?;
        fold_metrics.push(m);
    }
    cv_aggregate(&fold_metrics)
}

const CV_CSV_HEADER: &str = "model,accuracy_mean,accuracy_std,precision_mean,precision_std,recall_mean,recall_std,f1_mean,f1_std";

fn cv_csv_row(name: &str, s: &CvSummary) -> String {
    format!(
        "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
        name,
        s.accuracy.mean,
        s.accuracy.std,
        s.weighted_precision.mean,
        s.weighted_precision.std,
        s.weighted_recall.mean,
        s.weighted_recall.std,
        s.weighted_f1.mean,
        s.weighted_f1.std,
    )
}

fn cv_text_row(name: &str, s: &CvSummary) -> String {
    format!(
        "{:<10} acc {:.4}±{:.4}  prec {:.4}±{:.4}  rec {:.4}±{:.4}  f1 {:.4}±{:.4}",
        name,
        s.accuracy.mean,
        s.accuracy.std,
        s.weighted_precision.mean,
        s.weighted_precision.std,
        s.weighted_recall.mean,
        s.weighted_recall.std,
        s.weighted_f1.mean,
        s.weighted_f1.std,
    )
}

pub fn cmd_compare(cfg: &RunConfig, models: &str, cv: Option<usize>, json: bool) -> Result<()> {
    let algos = parse_models(models)?;
    let out = &cfg.output.dir;

    if let Some(k) = cv {
        let mut cv_cfg = cfg.clone();
        cv_cfg.split.k = k;
        let corpus = load_corpus(&cv_cfg)?;
        let mut rows = Vec::new();
        let mut failures: Vec<(String, Error)> = Vec::new();
        for &algo in &algos {
            match cross_validate(algo, &cv_cfg, &corpus) {
                Ok(summary) => rows.push((algo.name().to_string(), summary)),
                Err(e) => {
                    eprintln!("warning: {} cross-validation failed: {e}", algo.name());
                    failures.push((algo.name().to_string(), e));
                }
            }
        }
        if rows.is_empty() {
            return Err(failures.remove(0).1);
        }
        let mut csv = String::from(CV_CSV_HEADER);
        csv.push('\n');
        for (name, s) in &rows {
            csv.push_str(&cv_csv_row(name, s));
            csv.push('\n');
        }
        for (name, _) in &failures {
            csv.push_str(&format!("{name},nan,nan,nan,nan,nan,nan,nan,nan\n"));
        }
        write_atomic(&out.join("cv_summary.csv"), csv.as_bytes())?;
        if json {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|(name, s)| {
                    serde_json::json!({
                        "model": name,
                        "k": s.k,
                        "accuracy": {"mean": s.accuracy.mean, "std": s.accuracy.std},
                        "weighted_precision": {"mean": s.weighted_precision.mean, "std": s.weighted_precision.std},
                        "weighted_recall": {"mean": s.weighted_recall.mean, "std": s.weighted_recall.std},
                        "weighted_f1": {"mean": s.weighted_f1.mean, "std": s.weighted_f1.std},
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&items)
                    .map_err(|e| Error::InvalidConfig(format!("serializing cv: {e}")))?
            );
        } else {
            println!("{k}-fold cross-validation");
            for (name, s) in &rows {
                println!("{}", cv_text_row(name, s));
            }
            for (name, e) in &failures {
                println!("{name:<10} FAILED: {e}");
            }
        }
        return Ok(());
    }

    let fit = prepare(cfg)?;
    let mut ok_rows = Vec::new();
    let mut failures: Vec<(String, Error)> = Vec::new();
    for &algo in &algos {
        match train_eval_persist(algo, cfg, &fit) {
            Ok(row) => ok_rows.push(row),
            Err(e) => {
                eprintln!("warning: {} failed: {e}", algo.name());
                failures.push((algo.name().to_string(), e));
            }
        }
    }
    if ok_rows.is_empty() {
        return Err(failures.remove(0).1);
    }

    write_atomic(&out.join("vocab.tsv"), fit.tfidf.vocab_tsv().as_bytes())?;

    let rows = leaderboard(ok_rows)?;
    let mut text = leaderboard_text(&rows);
    let mut csv = leaderboard_csv(&rows);
    for (name, e) in &failures {
        text.push_str(&format!("{name:<10} FAILED: {e}\n"));
        csv.push_str(&format!("{name},nan,nan,nan,nan\n"));
    }
    write_atomic(&out.join("leaderboard.txt"), text.as_bytes())?;
    write_atomic(&out.join("leaderboard.csv"), csv.as_bytes())?;

    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&rows)
                .map_err(|e| Error::InvalidConfig(format!("serializing leaderboard: {e}")))?
        );
    } else {
        print!("{text}");
        println!("artifacts in {}", out.display());
    }
    Ok(())
}

/// State rebuilt from a model file: everything prediction needs.
struct Predictor {
    model: AnyModel,
    tfidf: Option<TfIdfModel>,
    vocab: Option<Vocabulary>,
    pipeline: PipelineConfig,
    prior: [f64; 3],
}

fn meta_parse<T: std::str::FromStr>(file: &ModelFile, key: &str) -> Result<T> {
    let raw = file
        .meta
        .get(key)
        .ok_or_else(|| Error::ModelFormat(format!("meta missing {key}")))?;
    raw.parse()
        .map_err(|_| Error::ModelFormat(format!("meta {key} has bad value {raw:?}")))
}

fn load_predictor(path: &Path) -> Result<Predictor> {
    let file = ModelFile::load(path)?;
    file.verify_fingerprint()?;
    let model = unpack(&file)?;

    let max_tokens: usize = meta_parse(&file, "max_tokens")?;
    let min_freq: usize = meta_parse(&file, "min_freq")?;
    let mut pipeline = PipelineConfig::vendored();
    pipeline.max_tokens = max_tokens;

    let prior = match file.meta.get("class_prior") {
        Some(raw) => {
            let parts: Vec<f64> = raw
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| Error::ModelFormat(format!("bad class_prior {raw:?}")))
                })
                .collect::<Result<_>>()?;
            if parts.len() != 3 {
                return Err(Error::ModelFormat(format!("bad class_prior {raw:?}")));
            }
            [parts[0], parts[1], parts[2]]
        }
        None => [1.0 / 3.0; 3],
    };

    let terms: Vec<String> = file.vocab.iter().skip(2).map(|(t, _)| t.clone()).collect();
    let vocab = Vocabulary::from_terms(&terms, min_freq);

    let tfidf = match model {
        AnyModel::Lstm(_) => None,
        _ => Some(TfIdfModel {
            vocab: vocab.clone(),
            df: file.vocab.iter().map(|(_, df)| *df).collect(),
            n_docs: meta_parse(&file, "n_docs")?,
            variant: IdfVariant::from_name(
                file.meta
                    .get("idf")
                    .map(String::as_str)
                    .unwrap_or("plus-one"),
            )
            .map_err(|e| Error::ModelFormat(e.to_string()))?,
        }),
    };

    Ok(Predictor {
        model,
        tfidf,
        vocab: Some(vocab),
        pipeline,
        prior,
    })
}

struct PredictionRecord {
    label: Sentiment,
    probs: [f64; 3],
    degenerate: bool,
}

fn predict_text(p: &Predictor, text: &str) -> Result<PredictionRecord> {
    let dict = RootDictionary::vendored();
    let tokens = run_pipeline(text, &p.pipeline, dict);
    match &p.model {
        AnyModel::Nb(m) => {
            let x = p.tfidf.as_ref().expect("tf-idf state").vectorize(&tokens);
            let pred = m.predict(&x)?;
            Ok(PredictionRecord {
                label: pred.label,
                probs: pred.probs,
                degenerate: tokens.is_empty(),
            })
        }
        AnyModel::Lr(m) => {
            let x = p.tfidf.as_ref().expect("tf-idf state").vectorize(&tokens);
            let pred = m.predict(&x)?;
            Ok(PredictionRecord {
                label: pred.label,
                probs: pred.probs,
                degenerate: tokens.is_empty(),
            })
        }
        AnyModel::Rf(m) => {
            let x = p.tfidf.as_ref().expect("tf-idf state").vectorize(&tokens);
            let pred = m.predict(&x)?;
            Ok(PredictionRecord {
                label: pred.label,
                probs: pred.probs,
                degenerate: tokens.is_empty(),
            })
        }
        AnyModel::Lstm(params) => {
            let vocab = p.vocab.as_ref().expect("vocabulary");
            let seq = encode_seq(&tokens, vocab, p.pipeline.max_tokens);
            if seq.true_len == 0 {
                return Ok(PredictionRecord {
                    label: Sentiment::from_index(argmax3(&p.prior)),
                    probs: p.prior,
                    degenerate: true,
                });
            }
            let (probs, _) = forward(&seq, params, Mode::Infer)?;
            let probs = [probs[0], probs[1], probs[2]];
            Ok(PredictionRecord {
                label: Sentiment::from_index(argmax3(&probs)),
                probs,
                degenerate: false,
            })
        }
    }
}

fn print_prediction(rec: &PredictionRecord, json: bool) -> Result<()> {
    if json {
        println!(
            "{}",
            serde_json::to_string(&serde_json::json!({
                "label": rec.label.name(),
                "probs": {
                    "negative": rec.probs[0],
                    "positive": rec.probs[1],
                    "neutral": rec.probs[2],
                },
                "degenerate": rec.degenerate,
            }))
            .map_err(|e| Error::InvalidConfig(format!("serializing prediction: {e}")))?
        );
    } else {
        println!(
            "{}\tnegative={:.6}\tpositive={:.6}\tneutral={:.6}",
            rec.label.name(),
            rec.probs[0],
            rec.probs[1],
            rec.probs[2]
        );
    }
    Ok(())
}

pub fn cmd_predict(model_path: &Path, text: Option<&str>, stdin: bool, json: bool) -> Result<()> {
    let predictor = load_predictor(model_path)?;
    let inputs: Vec<String> = match (text, stdin) {
        (Some(t), false) => vec![t.to_string()],
        (None, true) => {
            let mut lines = Vec::new();
            for line in std::io::stdin().lock().lines() {
                lines.push(line.map_err(|e| Error::io(Path::new("<stdin>"), e))?);
            }
            lines
        }
        (Some(_), true) => {
            return Err(Error::InvalidConfig(
                "predict takes either --text or --stdin, not both".into(),
            ))
        }
        (None, false) => {
            return Err(Error::InvalidConfig(
                "predict needs --text TEXT or --stdin".into(),
            ))
        }
    };
    for (i, input) in inputs.iter().enumerate() {
        let rec = predict_text(&predictor, input)?;
        if rec.degenerate {
            eprintln!(
                "warning: input {} produced no tokens; falling back to the class prior",
                i + 1
            );
        }
        print_prediction(&rec, json)?;
    }
    Ok(())
}

pub fn cmd_stem(words: &[String], trace_word: Option<&str>, json: bool) -> Result<()> {
    let dict = RootDictionary::vendored();
    if let Some(word) = trace_word {
        let trace = stem_trace(word, dict);
        if json {
            let steps: Vec<serde_json::Value> = trace
                .steps
                .iter()
                .map(|s| serde_json::json!({"rule": s.rule, "form": s.form}))
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "input": trace.input,
                    "steps": steps,
                    "output": trace.output,
                }))
                .map_err(|e| Error::InvalidConfig(format!("serializing trace: {e}")))?
            );
        } else {
            println!("input  {}", trace.input);
            for step in &trace.steps {
                println!("  {} -> {}", step.rule, step.form);
            }
            println!("output {}", trace.output);
        }
        return Ok(());
    }
    if words.is_empty() {
        return Err(Error::InvalidConfig(
            "stem needs words or --word WORD".into(),
        ));
    }
    if json {
        let items: Vec<serde_json::Value> = words
            .iter()
            .map(|w| serde_json::json!({"input": w, "output": stem(w, dict)}))
            .collect();
        println!(
            "{}",
            serde_json::to_string(&items)
                .map_err(|e| Error::InvalidConfig(format!("serializing stems: {e}")))?
        );
    } else {
        for w in words {
            println!("{w}\t{}", stem(w, dict));
        }
    }
    Ok(())
}

pub fn cmd_synth(cfg: &RunConfig, out: &Path, counts: Option<&str>) -> Result<()> {
    let counts = match counts {
        Some(raw) => {
            let parts: Vec<usize> = raw
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| Error::InvalidConfig(format!("bad counts {raw:?}")))
                })
                .collect::<Result<_>>()?;
            if parts.len() != 3 {
                return Err(Error::InvalidConfig(format!(
                    "counts must be three comma-separated integers, got {raw:?}"
                )));
            }
            [parts[0], parts[1], parts[2]]
        }
        None => SynthSpec::default().counts,
    };
    let spec = SynthSpec {
        counts,
        seed: cfg.seed,
    };
    let corpus = synth::generate(&spec);
    ensure_parent_dir(out)?;
    synth::write_csv(&corpus, out)?;
    println!(
        "wrote {} reviews ({} negative, {} positive, {} neutral) to {}",
        corpus.n(),
        corpus.counts()[0],
        corpus.counts()[1],
        corpus.counts()[2],
        out.display()
    );
    Ok(())
}
