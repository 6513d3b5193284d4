//! `sentikit` — train, evaluate, and serve Indonesian sentiment models from
//! the command line.
//!
//! Exit codes: 0 success, 2 data/config error, 3 training error, 4 model
//! file or fingerprint error.

mod config;
mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use sentikit::error::Error;

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "sentikit",
    version,
    about = "Indonesian app-review sentiment classification toolkit",
    propagate_version = true
)]
struct Cli {
    /// TOML run configuration; defaults reproduce the reference settings.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed override (split and model training).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Output location: directory for train/compare, file for
    /// preprocess/synth.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Machine-readable JSON on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the dataset's class distribution.
    Stats,

    /// Run the preprocessing pipeline on one text or a whole CSV.
    Preprocess {
        /// Input CSV; tokens are written to --out as JSON lines.
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,

        /// Preprocess a single text and print its tokens.
        #[arg(long, value_name = "TEXT")]
        text: Option<String>,
    },

    /// Train one model and evaluate it on the held-out test split.
    Train {
        /// nb, lr, rf, or lstm.
        #[arg(long, value_name = "NAME")]
        model: String,
    },

    /// Train and evaluate several models under one split and seed.
    Compare {
        /// Comma-separated subset of nb,lr,rf,lstm.
        #[arg(long, value_name = "LIST", default_value = "nb,lr,rf,lstm")]
        models: String,

        /// Run k-fold cross-validation instead of a single split.
        #[arg(long, value_name = "K")]
        cv: Option<usize>,
    },

    /// Classify text with a saved model file.
    Predict {
        /// Model file written by train/compare.
        #[arg(long, value_name = "FILE")]
        model: PathBuf,

        /// Classify this one text.
        #[arg(long, value_name = "TEXT")]
        text: Option<String>,

        /// Classify each stdin line, in order.
        #[arg(long)]
        stdin: bool,
    },

    /// Stem Indonesian words.
    Stem {
        /// Words to stem, one output line each.
        #[arg(value_name = "WORDS")]
        words: Vec<String>,

        /// Print the full rule trace for one word.
        #[arg(long, value_name = "WORD")]
        word: Option<String>,
    },

    /// Generate a synthetic review CSV compatible with the loader.
    Synth {
        /// Per-class record counts: negative,positive,neutral.
        #[arg(long, value_name = "N,N,N")]
        counts: Option<String>,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::FileNotFound(_)
        | Error::Io { .. }
        | Error::BadEncoding(_)
        | Error::MissingColumn(_)
        | Error::UnknownLabel { .. }
        | Error::EmptyText { .. }
        | Error::EmptyCorpus
        | Error::EmptyClass(_)
        | Error::FoldTooLarge { .. }
        | Error::InvalidConfig(_) => 2,
        Error::EmptyTrainingSet
        | Error::ZeroDf
        | Error::MissingClass(_)
        | Error::DimMismatch { .. }
        | Error::LengthMismatch { .. }
        | Error::EmptyEval
        | Error::EmptySequence
        | Error::EmptyTrainSet
        | Error::TooFewFolds(_) => 3,
        Error::ModelFormat(_) | Error::FingerprintMismatch { .. } => 4,
    }
}

fn dispatch(cli: &Cli) -> sentikit::Result<()> {
    let cfg = RunConfig::load(cli.config.as_deref(), cli.seed, cli.out.as_deref())?;
    match &cli.command {
        Command::Stats => run::cmd_stats(&cfg, cli.json),
        Command::Preprocess { input, text } => run::cmd_preprocess(
            &cfg,
            input.as_deref(),
            cli.out.as_deref(),
            text.as_deref(),
            cli.json,
        ),
        Command::Train { model } => run::cmd_train(&cfg, model, cli.json),
        Command::Compare { models, cv } => run::cmd_compare(&cfg, models, *cv, cli.json),
        Command::Predict { model, text, stdin } => {
            run::cmd_predict(model, text.as_deref(), *stdin, cli.json)
        }
        Command::Stem { words, word } => run::cmd_stem(words, word.as_deref(), cli.json),
        Command::Synth { counts } => {
            let out = cli.out.as_deref().ok_or_else(|| {
                Error::InvalidConfig("synth needs --out FILE for the generated CSV".into())
            })?;
            run::cmd_synth(&cfg, out, counts.as_deref())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(&cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
