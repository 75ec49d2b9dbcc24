//! `hypodx train`: one 80/10/10 split, checkpoint plus test report.


use clap::Args;

use hypodx::eval::{tri_split, FoldReport};
use hypodx::model::checkpoint::save_checkpoint;
use hypodx::runner::{fit, score_split, FittedModel};
use hypodx::svm::{save_svm_model, SvmModelFile};
use hypodx::text::embeddings::read_word2vec_text;
use hypodx::text::{prepare_rows, records::read_sentence_rows_path, stopwords::STOPWORDS_VERSION};
use hypodx::train::write_training_log_csv;
use hypodx::{Error, Result};

use crate::manifest::RunManifest;

use super::{ensure_out_dir, write_atomic};

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub cv: super::cv::CvArgs,
    /// Fractions of the corpus carved out for dev and test.
    #[arg(long, default_value_t = 0.10)]
    pub dev_fraction: f64,
    #[arg(long, default_value_t = 0.10)]
    pub test_fraction: f64,
}

pub fn run(args: TrainArgs) -> Result<()> {
    let resolved = super::cv::resolve(&args.cv)?;
    let out = &args.cv.out;
    ensure_out_dir(out)?;

    let rows = read_sentence_rows_path(&resolved.corpus)?;
    let mut records = prepare_rows(&rows, resolved.normalize)?;
    if let Some(cap) = resolved.opts.max_sentences {
        records = hypodx::text::records::downsample(&records, cap, resolved.opts.seed);
    }
    let embedding_entries = match &resolved.embeddings {
        Some(path) => {
            let f = std::fs::File::open(path)
                .map_err(|e| Error::Data(format!("cannot open embeddings {}: {e}", path.display())))?;
            read_word2vec_text(std::io::BufReader::new(f))?
        }
        None => Vec::new(),
    };

    let (train_idx, dev_idx, test_idx) = tri_split(
        records.len(),
        args.dev_fraction,
        args.test_fraction,
        resolved.opts.seed,
    )?;
    let fitted = fit(
        &records,
        &train_idx,
        &dev_idx,
        &embedding_entries,
        &resolved.opts.fit,
    )?;

    let scores = score_split(&fitted, &records, &test_idx)?;
    let report = FoldReport::from_scores(0, scores)?;
    let report_json =
        serde_json::to_string_pretty(&report).map_err(|e| Error::Format(e.to_string()))?;
    write_atomic(&out.join("test_report.json"), report_json.as_bytes())?;

    match &fitted {
        FittedModel::Neural { model, log } => {
            save_checkpoint(&out.join("checkpoint.json"), model)?;
            let mut csv = Vec::new();
            write_training_log_csv(&mut csv, log)?;
            write_atomic(&out.join("training_log.csv"), &csv)?;
        }
        FittedModel::Svm {
            model,
            config,
            bigrams,
            ..
        } => {
            save_svm_model(
                &out.join("svm_model.json"),
                &SvmModelFile {
                    format_version: 1,
                    config: config.clone(),
                    bigrams: *bigrams,
                    stopwords_version: STOPWORDS_VERSION.to_string(),
                    model: model.clone(),
                },
            )?;
        }
    }

    let mut run = RunManifest::new("train");
    run.add_input(&resolved.corpus)?;
    if let Some(e) = &resolved.embeddings {
        run.add_input(e)?;
    }
    run.extend(&resolved.opts.settings(records.len()));
    run.set("dev_fraction", args.dev_fraction);
    run.set("test_fraction", args.test_fraction);
    run.write(out)?;

    println!(
        "{}: test P {:.3} R {:.3} F1 {:.3} PR-AUC {:.3} ROC-AUC {:.3}",
        resolved.opts.fit.model, report.precision, report.recall, report.f1, report.pr_auc, report.roc_auc
    );
    Ok(())
}
