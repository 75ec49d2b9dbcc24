//! Corpus file formats: JSON Lines of labeled sentences, plus the raw-notes
//! variant used for unlabeled prediction.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One raw note, the unit of provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoteDocument {
    pub note_id: String,
    pub text: String,
}

/// A labeled sentence as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRow {
    pub note_id: String,
    pub sentence_index: u32,
    pub text: String,
    pub label: u8,
}

/// A tokenized, cropped sentence ready for encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceRecord {
    pub note_id: String,
    pub sentence_index: u32,
    pub tokens: Vec<String>,
    pub label: bool,
}

pub fn read_sentence_rows<R: BufRead>(reader: R) -> Result<Vec<SentenceRow>> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: SentenceRow = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        if row.label > 1 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("label must be 0 or 1, got {}", row.label),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_sentence_rows_path(path: &Path) -> Result<Vec<SentenceRow>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Data(format!("cannot open corpus {}: {e}", path.display())))?;
    read_sentence_rows(std::io::BufReader::new(file))
}

pub fn write_sentence_rows<W: Write>(mut writer: W, rows: &[SentenceRow]) -> Result<()> {
    for row in rows {
        serde_json::to_writer(&mut writer, row).map_err(|e| Error::Format(e.to_string()))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_notes<R: BufRead>(reader: R) -> Result<Vec<NoteDocument>> {
    let mut notes = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let note: NoteDocument = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        notes.push(note);
    }
    Ok(notes)
}

pub fn read_notes_path(path: &Path) -> Result<Vec<NoteDocument>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Data(format!("cannot open notes {}: {e}", path.display())))?;
    read_notes(std::io::BufReader::new(file))
}

/// Uniform down-sampling without replacement, order-preserving. The corpus
/// statistics section reports more sentences than the training section; the
/// reduction step between them is undocumented, so the pipeline offers this
/// explicit hook instead of guessing a filter.
pub fn downsample<T: Clone>(items: &[T], max_items: usize, seed: u64) -> Vec<T> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    if items.len() <= max_items {
        return items.to_vec();
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.shuffle(&mut rng);
    let mut keep: Vec<usize> = idx.into_iter().take(max_items).collect();
    keep.sort_unstable();
    keep.into_iter().map(|i| items[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_round_trip_is_identity() {
        let rows = vec![
            SentenceRow {
                note_id: "n1".into(),
                sentence_index: 0,
                text: "BS is low.".into(),
                label: 1,
            },
            SentenceRow {
                note_id: "n1".into(),
                sentence_index: 1,
                text: "Gave juice.".into(),
                label: 0,
            },
        ];
        let mut buf = Vec::new();
        write_sentence_rows(&mut buf, &rows).unwrap();
        let back = read_sentence_rows(&buf[..]).unwrap();
        assert_eq!(rows, back);
        let mut buf2 = Vec::new();
        write_sentence_rows(&mut buf2, &back).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn bad_label_is_a_parse_error() {
        let line = br#"{"note_id":"n","sentence_index":0,"text":"x","label":3}"#;
        assert!(matches!(
            read_sentence_rows(&line[..]),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn downsample_is_deterministic_and_bounded() {
        let items: Vec<u32> = (0..100).collect();
        let a = downsample(&items, 10, 7);
        let b = downsample(&items, 10, 7);
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert!(a.windows(2).all(|w| w[0] < w[1]), "order preserved");
        assert_ne!(a, downsample(&items, 10, 8));
        assert_eq!(downsample(&items, 200, 7).len(), 100);
    }
}
