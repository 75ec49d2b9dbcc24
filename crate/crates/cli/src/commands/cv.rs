//! `hypodx cv`: the 10-fold cross-validation protocol.

use std::path::PathBuf;

use clap::Args;

use hypodx::eval::report::write_curves_csv;
use hypodx::eval::SplitGranularity;
use hypodx::runner::{run_cv, CvOptions, ModelKind};
use hypodx::text::embeddings::read_word2vec_text;
use hypodx::text::{prepare_rows, records::read_sentence_rows_path};
use hypodx::train::write_training_log_csv;
use hypodx::{Error, Result};

use crate::config::FileConfig;
use crate::manifest::RunManifest;

use super::{ensure_out_dir, write_atomic};

#[derive(Debug, Args)]
pub struct CvArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// lstm | bilstm | cnn | tcn | svm
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads inside each fold's training; never changes results.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// sentence | note
    #[arg(long)]
    pub granularity: Option<String>,
    #[arg(long)]
    pub normalize_glucose: bool,
    /// Down-sample the corpus to at most this many sentences (recorded).
    #[arg(long)]
    pub max_sentences: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub svm_c: Option<f64>,
    #[arg(long)]
    pub svm_gamma: Option<f64>,
    #[arg(long)]
    pub svm_max_train: Option<usize>,
    #[arg(long)]
    pub bigrams: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub struct ResolvedCv {
    pub corpus: PathBuf,
    pub embeddings: Option<PathBuf>,
    pub opts: CvOptions,
    pub normalize: bool,
}

pub fn resolve(args: &CvArgs) -> Result<ResolvedCv> {
    let file = FileConfig::load(args.config.as_deref())?;
    let corpus = match args.corpus.clone() {
        Some(c) => c,
        None => file
            .get::<String>("corpus")?
            .map(PathBuf::from)
            .ok_or_else(|| Error::Usage("--corpus is required".into()))?,
    };
    let model: ModelKind = file
        .resolve_opt("model", args.model.clone())?
        .ok_or_else(|| Error::Usage("--model is required".into()))?
        .parse()?;
    let embeddings = match args.embeddings.clone() {
        Some(e) => Some(e),
        None => file.get::<String>("embeddings")?.map(PathBuf::from),
    };
    if model != ModelKind::Svm && embeddings.is_none() {
        return Err(Error::Usage("--embeddings is required for neural models".into()));
    }
    let seed = file.resolve("seed", args.seed, 42u64)?;
    let mut opts = CvOptions::new(model, seed);
    opts.folds = file.resolve("folds", args.folds, 10)?;
    opts.max_sentences = file.resolve_opt("max_sentences", args.max_sentences)?;
    let granularity = file.resolve(
        "granularity",
        args.granularity.clone(),
        "sentence".to_string(),
    )?;
    opts.granularity = match granularity.as_str() {
        "sentence" => SplitGranularity::Sentence,
        "note" => SplitGranularity::Note,
        other => {
            return Err(Error::Usage(format!(
                "unknown granularity {other:?} (expected sentence|note)"
            )))
        }
    };
    let normalize = args.normalize_glucose
        || file.get::<bool>("normalize_glucose")?.unwrap_or(false);
    opts.fit.normalize_glucose = normalize;
    opts.fit.train.max_epochs = file.resolve("epochs", args.epochs, opts.fit.train.max_epochs)?;
    opts.fit.train.batch_size =
        file.resolve("batch_size", args.batch_size, opts.fit.train.batch_size)?;
    opts.fit.train.learning_rate = file.resolve(
        "learning_rate",
        args.learning_rate,
        opts.fit.train.learning_rate,
    )?;
    opts.fit.train.patience = file.resolve("patience", args.patience, opts.fit.train.patience)?;
    opts.fit.train.patience = opts.fit.train.patience.min(opts.fit.train.max_epochs);
    opts.fit.train.threads = file.resolve("jobs", args.jobs, 1usize)?.max(1);
    opts.fit.svm.c = file.resolve("svm_c", args.svm_c, opts.fit.svm.c)?;
    opts.fit.svm.gamma = file.resolve_opt("svm_gamma", args.svm_gamma)?;
    opts.fit.svm_max_train = file.resolve_opt("svm_max_train", args.svm_max_train)?;
    opts.fit.bigrams = args.bigrams || file.get::<bool>("bigrams")?.unwrap_or(false);
    Ok(ResolvedCv {
        corpus,
        embeddings,
        opts,
        normalize,
    })
}

pub fn run(args: CvArgs) -> Result<()> {
    let resolved = resolve(&args)?;
    ensure_out_dir(&args.out)?;

    let rows = read_sentence_rows_path(&resolved.corpus)?;
    let records = prepare_rows(&rows, resolved.normalize)?;
    let embedding_entries = match &resolved.embeddings {
        Some(path) => {
            let f = std::fs::File::open(path)
                .map_err(|e| Error::Data(format!("cannot open embeddings {}: {e}", path.display())))?;
            read_word2vec_text(std::io::BufReader::new(f))?
        }
        None => Vec::new(),
    };

    let outcome = run_cv(&records, &embedding_entries, &resolved.opts)?;

    let report_json = serde_json::to_string_pretty(&outcome.report)
        .map_err(|e| Error::Format(e.to_string()))?;
    write_atomic(&args.out.join("run_report.json"), report_json.as_bytes())?;

    let mut curves = Vec::new();
    write_curves_csv(&mut curves, &outcome.report)?;
    write_atomic(&args.out.join("curves.csv"), &curves)?;

    for (fold, log) in outcome.fold_logs.iter().enumerate() {
        if log.is_empty() {
            continue;
        }
        let mut csv = Vec::new();
        write_training_log_csv(&mut csv, log)?;
        write_atomic(&args.out.join(format!("fold_{fold}_log.csv")), &csv)?;
    }

    let mut run = RunManifest::new("cv");
    run.add_input(&resolved.corpus)?;
    if let Some(e) = &resolved.embeddings {
        run.add_input(e)?;
    }
    run.extend(&outcome.report.settings);
    run.set("jobs", resolved.opts.fit.train.threads);
    run.write(&args.out)?;

    println!(
        "{} cv: P {:.3}±{:.3} R {:.3}±{:.3} F1 {:.3}±{:.3} PR-AUC {:.3} ROC-AUC {:.3}",
        outcome.report.model,
        outcome.report.precision.mean,
        outcome.report.precision.std,
        outcome.report.recall.mean,
        outcome.report.recall.std,
        outcome.report.f1.mean,
        outcome.report.f1.std,
        outcome.report.pooled_pr_auc,
        outcome.report.pooled_roc_auc,
    );
    Ok(())
}
