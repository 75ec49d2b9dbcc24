//! End-to-end orchestration: fit a model on one split, score a test set,
//! and run the full k-fold cross-validation protocol.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{
    aggregate_folds, dev_split, kfold_split, kfold_split_notes, FoldReport, RunReport,
    ScoredSentence, SplitGranularity,
};
use crate::model::{checkpoint::TrainedModel, EncoderKind, ModelConfig};
use crate::svm::{predict_decision, train_svm, SparseVec, SvmConfig, SvmModel};
use crate::text::{
    bow::BowSpace, embeddings::build_table, records::downsample, SentenceRecord, Vocabulary,
};
use crate::train::{train_model, EncodedSentence, EpochLog, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lstm,
    Bilstm,
    Cnn,
    Tcn,
    Svm,
}

impl ModelKind {
    pub fn encoder(self) -> Option<EncoderKind> {
        match self {
            ModelKind::Lstm => Some(EncoderKind::Lstm),
            ModelKind::Bilstm => Some(EncoderKind::Bilstm),
            ModelKind::Cnn => Some(EncoderKind::Cnn),
            ModelKind::Tcn => Some(EncoderKind::Tcn),
            ModelKind::Svm => None,
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelKind::Lstm => "lstm",
            ModelKind::Bilstm => "bilstm",
            ModelKind::Cnn => "cnn",
            ModelKind::Tcn => "tcn",
            ModelKind::Svm => "svm",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lstm" => Ok(ModelKind::Lstm),
            "bilstm" => Ok(ModelKind::Bilstm),
            "cnn" => Ok(ModelKind::Cnn),
            "tcn" => Ok(ModelKind::Tcn),
            "svm" => Ok(ModelKind::Svm),
            other => Err(Error::Usage(format!(
                "unknown model kind {other:?} (expected lstm|bilstm|cnn|tcn|svm)"
            ))),
        }
    }
}

/// Everything needed to fit one model on one training split.
#[derive(Debug, Clone)]
pub struct FitOptions {
    pub model: ModelKind,
    /// Encoder dimensions etc.; the encoder field must match `model` for
    /// neural kinds.
    pub model_config: ModelConfig,
    pub train: TrainConfig,
    pub svm: SvmConfig,
    /// Cap on SVM training examples; positives are kept, negatives are
    /// down-sampled under the SVM seed.
    pub svm_max_train: Option<usize>,
    pub bigrams: bool,
    /// Recorded into checkpoints so prediction applies the same pipeline.
    pub normalize_glucose: bool,
}

impl FitOptions {
    pub fn new(model: ModelKind, seed: u64) -> FitOptions {
        let encoder = model.encoder().unwrap_or(EncoderKind::Cnn);
        FitOptions {
            model,
            model_config: ModelConfig::new(encoder, seed),
            train: TrainConfig {
                seed,
                ..TrainConfig::default()
            },
            svm: SvmConfig {
                seed,
                ..SvmConfig::default()
            },
            svm_max_train: None,
            bigrams: false,
            normalize_glucose: false,
        }
    }
}

#[derive(Debug)]
pub enum FittedModel {
    Neural {
        model: TrainedModel,
        log: Vec<EpochLog>,
    },
    Svm {
        bow: BowSpace,
        model: SvmModel,
        config: SvmConfig,
        bigrams: bool,
    },
}

impl FittedModel {
    pub fn log(&self) -> &[EpochLog] {
        match self {
            FittedModel::Neural { log, .. } => log,
            FittedModel::Svm { .. } => &[],
        }
    }

    /// Positive scores for the given records; neural scores are softmax
    /// probabilities, SVM scores are decision values squashed through a
    /// fixed sigmoid so that 0.5 corresponds to the sign rule (rank order,
    /// and hence the AUCs, are unchanged).
    pub fn score_records(&self, records: &[&SentenceRecord]) -> Result<Vec<ScoredSentence>> {
        match self {
            FittedModel::Neural { model, .. } => records
                .iter()
                .map(|r| {
                    let ids = model.vocab.encode(&r.tokens)?;
                    Ok(ScoredSentence {
                        score: model.network.score(&ids)?,
                        gold: r.label,
                    })
                })
                .collect(),
            FittedModel::Svm { bow, model, .. } => records
                .iter()
                .map(|r| {
                    let v = bow.vectorize(&r.tokens);
                    let d = predict_decision(model, &v);
                    Ok(ScoredSentence {
                        score: crate::num::ops::sigmoid(d),
                        gold: r.label,
                    })
                })
                .collect(),
        }
    }
}

fn gather<'a>(records: &'a [SentenceRecord], idx: &[usize]) -> Vec<&'a SentenceRecord> {
    idx.iter().map(|&i| &records[i]).collect()
}

fn encode_set(records: &[&SentenceRecord], vocab: &Vocabulary) -> Result<Vec<EncodedSentence>> {
    records
        .iter()
        .map(|r| {
            Ok(EncodedSentence {
                ids: vocab.encode(&r.tokens)?,
                label: r.label,
            })
        })
        .collect()
}

/// Fit one model on `train_idx` (with `dev_idx` for model selection).
/// The vocabulary comes from the training records only.
pub fn fit(
    records: &[SentenceRecord],
    train_idx: &[usize],
    dev_idx: &[usize],
    embedding_entries: &[(String, Vec<f64>)],
    opts: &FitOptions,
) -> Result<FittedModel> {
    let train_records = gather(records, train_idx);
    let dev_records = gather(records, dev_idx);
    if train_records.is_empty() {
        return Err(Error::Data("empty training split".into()));
    }
    match opts.model {
        ModelKind::Svm => {
            let (train_records, _dropped) = subsample_for_svm(
                &train_records,
                opts.svm_max_train,
                opts.svm.seed,
            );
            let token_lists: Vec<Vec<String>> =
                train_records.iter().map(|r| r.tokens.clone()).collect();
            let bow = BowSpace::build(&token_lists, opts.bigrams)?;
            let xs: Vec<SparseVec> = train_records
                .iter()
                .map(|r| bow.vectorize(&r.tokens))
                .collect();
            let ys: Vec<f64> = train_records
                .iter()
                .map(|r| if r.label { 1.0 } else { -1.0 })
                .collect();
            let model = train_svm(&xs, &ys, bow.dim(), &opts.svm)?;
            Ok(FittedModel::Svm {
                bow,
                model,
                config: opts.svm.clone(),
                bigrams: opts.bigrams,
            })
        }
        _ => {
            let mut config = opts.model_config.clone();
            config.encoder = opts
                .model
                .encoder()
                .ok_or_else(|| Error::Usage("neural fit on svm kind".into()))?;
            config.validate()?;
            let vocab = Vocabulary::build(train_records.iter().map(|r| r.tokens.iter()))?;
            let table = build_table(embedding_entries, &vocab, config.embed_dim, config.seed)?;
            let train_set = encode_set(&train_records, &vocab)?;
            let dev_set = encode_set(&dev_records, &vocab)?;
            let outcome = train_model(&config, &table, &train_set, &dev_set, &opts.train)?;
            Ok(FittedModel::Neural {
                model: TrainedModel {
                    network: outcome.network,
                    vocab,
                    normalize_glucose: opts.normalize_glucose,
                },
                log: outcome.log,
            })
        }
    }
}

/// Keep every positive, down-sample negatives to fit the cap.
fn subsample_for_svm<'a>(
    records: &[&'a SentenceRecord],
    max_train: Option<usize>,
    seed: u64,
) -> (Vec<&'a SentenceRecord>, usize) {
    let cap = match max_train {
        Some(cap) if records.len() > cap => cap,
        _ => return (records.to_vec(), 0),
    };
    let positives: Vec<&SentenceRecord> =
        records.iter().copied().filter(|r| r.label).collect();
    let negatives: Vec<&SentenceRecord> =
        records.iter().copied().filter(|r| !r.label).collect();
    let keep_neg = cap.saturating_sub(positives.len()).max(1);
    let sampled = downsample(&negatives, keep_neg, seed);
    let dropped = negatives.len() - sampled.len();
    let mut out = positives;
    out.extend(sampled);
    (out, dropped)
}

/// Score a test split with a fitted model.
pub fn score_split(
    fitted: &FittedModel,
    records: &[SentenceRecord],
    test_idx: &[usize],
) -> Result<Vec<ScoredSentence>> {
    fitted.score_records(&gather(records, test_idx))
}

#[derive(Debug, Clone)]
pub struct CvOptions {
    pub fit: FitOptions,
    pub folds: usize,
    pub seed: u64,
    pub granularity: SplitGranularity,
    pub dev_fraction: f64,
    pub max_sentences: Option<usize>,
}

impl CvOptions {
    pub fn new(model: ModelKind, seed: u64) -> CvOptions {
        CvOptions {
            fit: FitOptions::new(model, seed),
            folds: 10,
            seed,
            granularity: SplitGranularity::Sentence,
            dev_fraction: 0.10,
            max_sentences: None,
        }
    }

    pub fn settings(&self, n_records: usize) -> BTreeMap<String, String> {
        let mut s = BTreeMap::new();
        s.insert("model".into(), self.fit.model.to_string());
        s.insert("folds".into(), self.folds.to_string());
        s.insert("seed".into(), self.seed.to_string());
        s.insert("granularity".into(), self.granularity.to_string());
        s.insert("dev_fraction".into(), self.dev_fraction.to_string());
        s.insert("sentences".into(), n_records.to_string());
        s.insert(
            "max_sentences".into(),
            self.max_sentences.map_or("none".into(), |m| m.to_string()),
        );
        s.insert(
            "normalize_glucose".into(),
            self.fit.normalize_glucose.to_string(),
        );
        s.insert("learning_rate".into(), self.fit.train.learning_rate.to_string());
        s.insert("batch_size".into(), self.fit.train.batch_size.to_string());
        s.insert("max_epochs".into(), self.fit.train.max_epochs.to_string());
        s.insert("patience".into(), self.fit.train.patience.to_string());
        if self.fit.model == ModelKind::Svm {
            s.insert("svm_c".into(), self.fit.svm.c.to_string());
            s.insert(
                "svm_gamma".into(),
                self.fit
                    .svm
                    .gamma
                    .map_or("1/features".into(), |g| g.to_string()),
            );
            s.insert("bigrams".into(), self.fit.bigrams.to_string());
            s.insert(
                "svm_max_train".into(),
                self.fit.svm_max_train.map_or("none".into(), |m| m.to_string()),
            );
        }
        s
    }
}

#[derive(Debug)]
pub struct CvOutcome {
    pub report: RunReport,
    pub fold_logs: Vec<Vec<EpochLog>>,
}

fn mix(seed: u64, fold: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(fold.wrapping_mul(0x2545_f491_4f6c_dd1d))
}

/// The full protocol: k folds, each with a 10% dev carve-out from its
/// training side, vocabulary rebuilt per fold, fold seeds derived from the
/// root seed so fold order or parallelism cannot change results.
pub fn run_cv(
    records: &[SentenceRecord],
    embedding_entries: &[(String, Vec<f64>)],
    opts: &CvOptions,
) -> Result<CvOutcome> {
    let records: Vec<SentenceRecord> = match opts.max_sentences {
        Some(cap) => downsample(records, cap, opts.seed),
        None => records.to_vec(),
    };
    let plan = match opts.granularity {
        SplitGranularity::Sentence => kfold_split(records.len(), opts.folds, opts.seed)?,
        SplitGranularity::Note => {
            let mut note_ids: Vec<&str> = Vec::new();
            let mut note_of = Vec::with_capacity(records.len());
            let mut index: std::collections::HashMap<&str, usize> = Default::default();
            for r in &records {
                let next = note_ids.len();
                let id = *index.entry(r.note_id.as_str()).or_insert_with(|| {
                    note_ids.push(r.note_id.as_str());
                    next
                });
                note_of.push(id);
            }
            kfold_split_notes(&note_of, opts.folds, opts.seed)?
        }
    };

    let mut folds = Vec::with_capacity(opts.folds);
    let mut fold_logs = Vec::with_capacity(opts.folds);
    for fold in 0..opts.folds {
        let fold_seed = mix(opts.seed, fold as u64);
        let test_idx = plan.fold_indices(fold);
        let rest_idx = plan.rest_indices(fold);
        let (train_idx, dev_idx) = dev_split(&rest_idx, opts.dev_fraction, fold_seed)?;
        let mut fit_opts = opts.fit.clone();
        fit_opts.model_config.seed = fold_seed;
        fit_opts.train.seed = fold_seed;
        fit_opts.svm.seed = fold_seed;
        let fitted = fit(&records, &train_idx, &dev_idx, embedding_entries, &fit_opts)?;
        let scores = score_split(&fitted, &records, &test_idx)?;
        folds.push(FoldReport::from_scores(fold, scores)?);
        fold_logs.push(fitted.log().to_vec());
    }
    let report = aggregate_folds(
        &opts.fit.model.to_string(),
        opts.granularity,
        opts.seed,
        folds,
        opts.settings(records.len()),
    )?;
    Ok(CvOutcome { report, fold_logs })
}

/// Score raw notes with a trained checkpoint: split, tokenize, optionally
/// normalize, crop, encode, score.
pub fn predict_notes(
    model: &TrainedModel,
    notes: &[crate::text::NoteDocument],
) -> Result<Vec<PredictedSentence>> {
    let mut out = Vec::new();
    for note in notes {
        for (i, sentence) in crate::text::split_sentences(&note.text).iter().enumerate() {
            let mut tokens = crate::text::tokenize(sentence);
            if model.normalize_glucose {
                tokens = crate::glucose::normalize_sentence(
                    &tokens,
                    &crate::glucose::NormalizerConfig::default(),
                );
            }
            let tokens = crate::text::crop_tokens(tokens);
            if tokens.is_empty() {
                continue;
            }
            let ids = model.vocab.encode(&tokens)?;
            out.push(PredictedSentence {
                note_id: note.note_id.clone(),
                sentence_index: i as u32,
                text: sentence.clone(),
                score: model.network.score(&ids)?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictedSentence {
    pub note_id: String,
    pub sentence_index: u32,
    pub text: String,
    pub score: f64,
}
