//! Corpus pipeline: sentence splitting, tokenization, cropping,
//! vocabulary, pretrained embeddings, and bag-of-words features.

pub mod bow;
pub mod embeddings;
pub mod records;
pub mod split;
pub mod stopwords;
pub mod tokenize;
pub mod vocab;

pub use bow::BowSpace;
pub use embeddings::{load_embeddings, EmbeddingTable};
pub use records::{NoteDocument, SentenceRecord, SentenceRow};
pub use split::split_sentences;
pub use tokenize::{crop_tokens, tokenize, MAX_TOKENS};
pub use vocab::{Vocabulary, PAD_ID, UNK_ID};

use crate::error::Result;

/// Tokenize, optionally normalize numeric glucose mentions, and crop one
/// sentence row into a [`SentenceRecord`]. Returns None when tokenization
/// yields nothing (e.g. a punctuation-only line).
pub fn prepare_row(row: &SentenceRow, normalize: bool) -> Option<SentenceRecord> {
    let mut tokens = tokenize(&row.text);
    if normalize {
        tokens = crate::glucose::normalize_sentence(&tokens, &crate::glucose::NormalizerConfig::default());
    }
    let tokens = crop_tokens(tokens);
    if tokens.is_empty() {
        return None;
    }
    Some(SentenceRecord {
        note_id: row.note_id.clone(),
        sentence_index: row.sentence_index,
        tokens,
        label: row.label == 1,
    })
}

/// Prepare a whole corpus, dropping token-less rows.
pub fn prepare_rows(rows: &[SentenceRow], normalize: bool) -> Result<Vec<SentenceRecord>> {
    Ok(rows.iter().filter_map(|r| prepare_row(r, normalize)).collect())
}
