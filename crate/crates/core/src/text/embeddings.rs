//! Word-vector table keyed by vocabulary id, loaded from word2vec text
//! format. Vocabulary words missing from the file are initialized uniform
//! in [-0.25, 0.25] under a fixed seed; the PAD row stays zero.

use std::io::{BufRead, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::num::Matrix;
use crate::text::vocab::{Vocabulary, PAD_ID};

pub const OOV_INIT_RANGE: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    matrix: Matrix,
}

impl EmbeddingTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab_size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn row(&self, id: u32) -> &[f64] {
        self.matrix.row(id as usize)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// Parse a word2vec text file: an optional "<count> <dim>" header, then one
/// "<word> <v1> ... <vdim>" line per word.
pub fn read_word2vec_text<R: BufRead>(reader: R) -> Result<Vec<(String, Vec<f64>)>> {
    let mut entries: Vec<(String, Vec<f64>)> = Vec::new();
    let mut dim: Option<usize> = None;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split_ascii_whitespace();
        let word = fields
            .next()
            .ok_or_else(|| Error::Parse {
                line: lineno,
                msg: "empty line".into(),
            })?
            .to_string();
        let values: Vec<&str> = fields.collect();
        if lineno == 1 && values.len() == 1 {
            // Header "<count> <dim>": both fields integers.
            if let (Ok(_), Ok(d)) = (word.parse::<usize>(), values[0].parse::<usize>()) {
                dim = Some(d);
                continue;
            }
        }
        let vector: Vec<f64> = values
            .iter()
            .map(|v| {
                v.parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno,
                    msg: format!("bad float {v:?}: {e}"),
                })
            })
            .collect::<Result<_>>()?;
        if vector.is_empty() {
            return Err(Error::Parse {
                line: lineno,
                msg: "no vector values".into(),
            });
        }
        match dim {
            None => dim = Some(vector.len()),
            Some(d) if d != vector.len() => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {d} values, found {}", vector.len()),
                })
            }
            _ => {}
        }
        entries.push((word, vector));
    }
    Ok(entries)
}

/// Build the table for `vocab` from the file at `path`.
pub fn load_embeddings(
    path: &Path,
    vocab: &Vocabulary,
    expected_dim: usize,
    oov_seed: u64,
) -> Result<EmbeddingTable> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Data(format!("cannot open embeddings {}: {e}", path.display())))?;
    let entries = read_word2vec_text(std::io::BufReader::new(file))?;
    build_table(&entries, vocab, expected_dim, oov_seed)
}

pub fn build_table(
    entries: &[(String, Vec<f64>)],
    vocab: &Vocabulary,
    expected_dim: usize,
    oov_seed: u64,
) -> Result<EmbeddingTable> {
    if let Some((_, v)) = entries.first() {
        if v.len() != expected_dim {
            return Err(Error::Format(format!(
                "embedding file dimension {} does not match the configured {expected_dim}",
                v.len()
            )));
        }
    }
    let mut matrix = Matrix::zeros(vocab.size(), expected_dim);
    let mut filled = vec![false; vocab.size()];
    filled[PAD_ID as usize] = true; // stays zero
    for (word, vector) in entries {
        if vocab.contains(word) {
            let id = vocab.id(word) as usize;
            matrix.row_mut(id).copy_from_slice(vector);
            filled[id] = true;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(oov_seed);
    for id in 0..vocab.size() {
        if !filled[id] {
            for v in matrix.row_mut(id) {
                *v = rng.gen_range(-OOV_INIT_RANGE..OOV_INIT_RANGE);
            }
        }
    }
    Ok(EmbeddingTable {
        dim: expected_dim,
        matrix,
    })
}

/// Write entries in word2vec text format with a header line.
pub fn write_word2vec_text<W: Write>(mut w: W, entries: &[(String, Vec<f64>)]) -> Result<()> {
    let dim = entries.first().map_or(0, |(_, v)| v.len());
    writeln!(w, "{} {}", entries.len(), dim)?;
    for (word, vector) in entries {
        write!(w, "{word}")?;
        for v in vector {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab_of(words: &[&str]) -> Vocabulary {
        let sent: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        Vocabulary::build([sent.iter()]).unwrap()
    }

    #[test]
    fn present_word_copied_verbatim() {
        let entries = vec![
            ("low".to_string(), vec![0.5, -0.5, 0.25]),
            ("bs".to_string(), vec![1.0, 2.0, 3.0]),
        ];
        let vocab = vocab_of(&["bs", "low"]);
        let table = build_table(&entries, &vocab, 3, 99).unwrap();
        assert_eq!(table.row(vocab.id("bs")), &[1.0, 2.0, 3.0]);
        assert_eq!(table.row(vocab.id("low")), &[0.5, -0.5, 0.25]);
    }

    #[test]
    fn absent_word_in_range_and_seed_reproducible() {
        let entries = vec![("low".to_string(), vec![0.1, 0.2])];
        let vocab = vocab_of(&["bs", "low"]);
        let a = build_table(&entries, &vocab, 2, 7).unwrap();
        let b = build_table(&entries, &vocab, 2, 7).unwrap();
        let c = build_table(&entries, &vocab, 2, 8).unwrap();
        let row = a.row(vocab.id("bs"));
        assert!(row.iter().all(|v| v.abs() < OOV_INIT_RANGE));
        assert!(row.iter().any(|&v| v != 0.0));
        assert_eq!(row, b.row(vocab.id("bs")));
        assert_ne!(row, c.row(vocab.id("bs")));
    }

    #[test]
    fn pad_row_is_zero() {
        let entries = vec![("bs".to_string(), vec![1.0, 1.0])];
        let vocab = vocab_of(&["bs"]);
        let table = build_table(&entries, &vocab, 2, 7).unwrap();
        assert!(table.row(PAD_ID).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dimension_mismatch_is_a_format_error() {
        let entries = vec![("bs".to_string(), vec![1.0, 1.0])];
        let vocab = vocab_of(&["bs"]);
        assert!(matches!(
            build_table(&entries, &vocab, 100, 7),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "2 3\nbs 1.0 2.0 3.0\nlow 1.0 oops 3.0\n";
        let err = read_word2vec_text(text.as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_is_optional() {
        let with = "1 2\nbs 1.0 2.0\n";
        let without = "bs 1.0 2.0\n";
        let a = read_word2vec_text(with.as_bytes()).unwrap();
        let b = read_word2vec_text(without.as_bytes()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn write_read_round_trip() {
        let entries = vec![
            ("bs".to_string(), vec![0.125, -3.5]),
            ("low".to_string(), vec![1.0 / 3.0, 2.0]),
        ];
        let mut buf = Vec::new();
        write_word2vec_text(&mut buf, &entries).unwrap();
        let back = read_word2vec_text(&buf[..]).unwrap();
        assert_eq!(entries, back);
    }
}
