//! `hypodx predict`: per-sentence scores for raw notes.

use std::path::PathBuf;

use clap::Args;

use hypodx::model::load_checkpoint;
use hypodx::runner::predict_notes;
use hypodx::text::records::read_notes_path;
use hypodx::{Error, Result};

use crate::manifest::RunManifest;

use super::{ensure_out_dir, write_atomic};

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// JSON Lines of {"note_id", "text"}.
    #[arg(long)]
    pub notes: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: PredictArgs) -> Result<()> {
    // Load and validate everything before writing a single byte.
    let model = load_checkpoint(&args.checkpoint)?;
    let notes = read_notes_path(&args.notes)?;
    let predictions = predict_notes(&model, &notes)?;

    ensure_out_dir(&args.out)?;
    let mut bytes = Vec::new();
    for p in &predictions {
        serde_json::to_writer(&mut bytes, p).map_err(|e| Error::Format(e.to_string()))?;
        bytes.push(b'\n');
    }
    write_atomic(&args.out.join("scores.jsonl"), &bytes)?;

    let mut run = RunManifest::new("predict");
    run.add_input(&args.checkpoint)?;
    run.add_input(&args.notes)?;
    run.set("notes", notes.len());
    run.set("sentences_scored", predictions.len());
    run.set("normalize_glucose", model.normalize_glucose);
    run.write(&args.out)?;

    println!(
        "scored {} sentences from {} notes",
        predictions.len(),
        notes.len()
    );
    Ok(())
}
