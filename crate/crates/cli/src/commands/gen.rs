//! `hypodx gen`: synthetic corpus artifacts.

use std::path::PathBuf;

use clap::Args;

use hypodx::synth::{generate_corpus, SynthSpec};
use hypodx::text::embeddings::write_word2vec_text;
use hypodx::text::records::write_sentence_rows;
use hypodx::{Error, Result};

use crate::config::FileConfig;
use crate::manifest::RunManifest;

use super::{ensure_out_dir, write_atomic};

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Output directory for corpus.jsonl, embeddings.vec, notes.jsonl,
    /// corpus_manifest.json and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub notes: Option<usize>,
    #[arg(long)]
    pub positive_rate: Option<f64>,
    #[arg(long)]
    pub holdout_fraction: Option<f64>,
    #[arg(long)]
    pub numeric_fraction: Option<f64>,
    #[arg(long)]
    pub test_note_fraction: Option<f64>,
    #[arg(long)]
    pub sentences_per_note_mean: Option<f64>,
    #[arg(long)]
    pub sentences_per_note_sd: Option<f64>,
    /// Flat key=value config file; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: GenArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let defaults = SynthSpec::default();
    let spec = SynthSpec {
        n_notes: file.resolve("notes", args.notes, defaults.n_notes)?,
        positive_rate: file.resolve("positive_rate", args.positive_rate, defaults.positive_rate)?,
        synonym_holdout_fraction: file.resolve(
            "holdout_fraction",
            args.holdout_fraction,
            defaults.synonym_holdout_fraction,
        )?,
        numeric_case_fraction: file.resolve(
            "numeric_fraction",
            args.numeric_fraction,
            defaults.numeric_case_fraction,
        )?,
        test_note_fraction: file.resolve(
            "test_note_fraction",
            args.test_note_fraction,
            defaults.test_note_fraction,
        )?,
        sentences_per_note_mean: file.resolve(
            "sentences_per_note_mean",
            args.sentences_per_note_mean,
            defaults.sentences_per_note_mean,
        )?,
        sentences_per_note_sd: file.resolve(
            "sentences_per_note_sd",
            args.sentences_per_note_sd,
            defaults.sentences_per_note_sd,
        )?,
        seed: file.resolve("seed", args.seed, defaults.seed)?,
        ..defaults
    };

    ensure_out_dir(&args.out)?;
    let corpus = generate_corpus(&spec)?;

    let mut rows_bytes = Vec::new();
    write_sentence_rows(&mut rows_bytes, &corpus.rows)?;
    write_atomic(&args.out.join("corpus.jsonl"), &rows_bytes)?;

    let mut embed_bytes = Vec::new();
    write_word2vec_text(&mut embed_bytes, &corpus.embedding_entries)?;
    write_atomic(&args.out.join("embeddings.vec"), &embed_bytes)?;

    // Raw-notes variant for the predict path: sentences of each note
    // joined back into one body.
    let mut notes_bytes = Vec::new();
    {
        use std::io::Write;
        let mut current: Option<(String, Vec<String>)> = None;
        let flush = |cur: &mut Option<(String, Vec<String>)>,
                         out: &mut Vec<u8>|
         -> Result<()> {
            if let Some((note_id, sentences)) = cur.take() {
                let text = sentences.join(". ") + ".";
                let doc = hypodx::text::NoteDocument { note_id, text };
                serde_json::to_writer(&mut *out, &doc).map_err(|e| Error::Format(e.to_string()))?;
                out.write_all(b"\n")?;
            }
            Ok(())
        };
        for row in &corpus.rows {
            match &mut current {
                Some((id, sentences)) if *id == row.note_id => sentences.push(row.text.clone()),
                _ => {
                    flush(&mut current, &mut notes_bytes)?;
                    current = Some((row.note_id.clone(), vec![row.text.clone()]));
                }
            }
        }
        flush(&mut current, &mut notes_bytes)?;
    }
    write_atomic(&args.out.join("notes.jsonl"), &notes_bytes)?;

    let manifest_json = serde_json::to_string_pretty(&corpus.manifest)
        .map_err(|e| Error::Format(e.to_string()))?;
    write_atomic(&args.out.join("corpus_manifest.json"), manifest_json.as_bytes())?;

    let mut run = RunManifest::new("gen");
    run.set("seed", spec.seed);
    run.set("notes", spec.n_notes);
    run.set("positive_rate", spec.positive_rate);
    run.set("holdout_fraction", spec.synonym_holdout_fraction);
    run.set("numeric_fraction", spec.numeric_case_fraction);
    run.set("test_note_fraction", spec.test_note_fraction);
    run.set("sentences", corpus.rows.len());
    run.set(
        "positives",
        corpus.rows.iter().filter(|r| r.label == 1).count(),
    );
    run.write(&args.out)?;

    println!(
        "wrote {} sentences ({} notes) to {}",
        corpus.rows.len(),
        spec.n_notes,
        args.out.display()
    );
    Ok(())
}
