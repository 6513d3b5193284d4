//! Run configuration: a single TOML file controls the dataset, pipeline,
//! features, split, and every model's hyperparameters. Every field has a
//! default matching the reference experimental settings, so an empty file
//! (or no file) reproduces them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use sentikit::classifiers::{LrConfig, RfConfig};
use sentikit::corpus::{CsvOptions, SplitSpec};
use sentikit::error::{Error, Result};
use sentikit::features::IdfVariant;
use sentikit::lstm::TrainConfig;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed: drives the split and every model's training stream.
    pub seed: u64,
    pub data: DataSection,
    pub pipeline: PipelineSection,
    pub features: FeatureSection,
    pub split: SplitSection,
    pub nb: NbSection,
    pub lr: LrSection,
    pub rf: RfSection,
    pub lstm: LstmSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            seed: 42,
            data: DataSection::default(),
            pipeline: PipelineSection::default(),
            features: FeatureSection::default(),
            split: SplitSection::default(),
            nb: NbSection::default(),
            lr: LrSection::default(),
            rf: RfSection::default(),
            lstm: LstmSection::default(),
            output: OutputSection::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    /// Dataset path; falls back to the `SENTIKIT_DATA` environment variable.
    pub path: Option<PathBuf>,
    pub text_col: String,
    pub label_col: String,
    pub delimiter: String,
    /// Skip rows with empty review text instead of failing.
    pub skip_empty: bool,
}

impl Default for DataSection {
    fn default() -> DataSection {
        DataSection {
            path: None,
            text_col: "review".into(),
            label_col: "sentiment".into(),
            delimiter: ";".into(),
            skip_empty: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub max_tokens: usize,
}

impl Default for PipelineSection {
    fn default() -> PipelineSection {
        PipelineSection { max_tokens: 100 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSection {
    pub min_freq: usize,
    /// `plus-one` (ln(N/df + 1)) or `df-plus-one` (ln(N/(df+1))).
    pub idf: String,
}

impl Default for FeatureSection {
    fn default() -> FeatureSection {
        FeatureSection {
            min_freq: 2,
            idf: "plus-one".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub train_ratio: f64,
    pub k: usize,
}

impl Default for SplitSection {
    fn default() -> SplitSection {
        SplitSection {
            train_ratio: 0.8,
            k: 5,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct NbSection {
    pub alpha: f64,
}

impl Default for NbSection {
    fn default() -> NbSection {
        NbSection { alpha: 1.0 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct LrSection {
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub l2: f64,
    pub tol: f64,
}

impl Default for LrSection {
    fn default() -> LrSection {
        let d = LrConfig::default();
        LrSection {
            lr: d.lr,
            epochs: d.epochs,
            batch: d.batch,
            l2: d.l2,
            tol: d.tol,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfSection {
    pub n_trees: usize,
    pub max_depth: usize,
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
}

impl Default for RfSection {
    fn default() -> RfSection {
        let d = RfConfig::default();
        RfSection {
            n_trees: d.n_trees,
            max_depth: d.max_depth,
            features_per_split: d.features_per_split,
            bootstrap: d.bootstrap,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct LstmSection {
    pub d: usize,
    pub h: usize,
    pub lr: f64,
    pub batch: usize,
    pub epochs: usize,
    pub dropout: f64,
    /// Stratified share of the training split held out for the loss curves.
    pub val_fraction: f64,
    pub clip: Option<f64>,
}

impl Default for LstmSection {
    fn default() -> LstmSection {
        let d = TrainConfig::default();
        LstmSection {
            d: 64,
            h: 64,
            lr: d.lr,
            batch: d.batch,
            epochs: d.epochs,
            dropout: d.dropout,
            val_fraction: 0.1,
            clip: d.clip,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> OutputSection {
        OutputSection { dir: "out".into() }
    }
}

impl RunConfig {
    /// Loads the file if given, otherwise returns defaults. `seed`/`out`
    /// come from the command line as overrides.
    pub fn load(
        path: Option<&Path>,
        seed_override: Option<u64>,
        out_override: Option<&Path>,
    ) -> Result<RunConfig> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                toml::from_str(&text)
                    .map_err(|e| Error::InvalidConfig(format!("{}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(seed) = seed_override {
            cfg.seed = seed;
        }
        if let Some(out) = out_override {
            cfg.output.dir = out.to_path_buf();
        }
        Ok(cfg)
    }

    /// Resolved dataset path: config, then `SENTIKIT_DATA`.
    pub fn dataset_path(&self) -> Result<PathBuf> {
        if let Some(p) = &self.data.path {
            return Ok(p.clone());
        }
        if let Ok(env) = std::env::var("SENTIKIT_DATA") {
            if !env.is_empty() {
                return Ok(PathBuf::from(env));
            }
        }
        Err(Error::InvalidConfig(
            "no dataset: set [data].path in the config or the SENTIKIT_DATA environment variable"
                .into(),
        ))
    }

    pub fn csv_options(&self) -> Result<CsvOptions> {
        let delim = self.data.delimiter.as_bytes();
        if delim.len() != 1 {
            return Err(Error::InvalidConfig(format!(
                "delimiter must be one byte, got {:?}",
                self.data.delimiter
            )));
        }
        Ok(CsvOptions {
            delimiter: delim[0],
            text_col: self.data.text_col.clone(),
            label_col: self.data.label_col.clone(),
            skip_empty: self.data.skip_empty,
        })
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_ratio: self.split.train_ratio,
            seed: self.seed,
            k: self.split.k,
        }
    }

    pub fn idf_variant(&self) -> Result<IdfVariant> {
        IdfVariant::from_name(&self.features.idf)
    }

    pub fn lr_config(&self) -> LrConfig {
        LrConfig {
            lr: self.lr.lr,
            epochs: self.lr.epochs,
            batch: self.lr.batch,
            l2: self.lr.l2,
            tol: self.lr.tol,
            seed: self.seed,
        }
    }

    pub fn rf_config(&self) -> RfConfig {
        RfConfig {
            n_trees: self.rf.n_trees,
            max_depth: self.rf.max_depth,
            features_per_split: self.rf.features_per_split,
            bootstrap: self.rf.bootstrap,
            seed: self.seed,
        }
    }

    pub fn lstm_config(&self) -> TrainConfig {
        TrainConfig {
            lr: self.lstm.lr,
            batch: self.lstm.batch,
            epochs: self.lstm.epochs,
            dropout: self.lstm.dropout,
            seed: self.seed,
            clip: self.lstm.clip,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}
