//! Bag-of-words feature space for the SVM baseline: token counts over a
//! stopword-filtered vocabulary built from the training fold, with an
//! optional bigram extension.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::svm::SparseVec;
use crate::text::stopwords::is_stopword;
use crate::text::vocab::{Vocabulary, UNK_ID};

#[derive(Debug, Clone)]
pub struct BowSpace {
    vocab: Vocabulary,
    /// (first id, second id) -> feature index at vocab.size() + offset.
    bigram_ids: BTreeMap<(u32, u32), u32>,
    use_bigrams: bool,
}

impl BowSpace {
    /// Build from training token lists. Stopwords are removed before
    /// anything else, so they are absent from the vocabulary and bigrams
    /// span the filtered stream.
    pub fn build(training: &[Vec<String>], use_bigrams: bool) -> Result<BowSpace> {
        let filtered: Vec<Vec<String>> = training.iter().map(|t| filter_stopwords(t)).collect();
        let vocab = Vocabulary::build(filtered.iter())?;
        let mut bigram_ids = BTreeMap::new();
        if use_bigrams {
            for tokens in &filtered {
                for pair in tokens.windows(2) {
                    let key = (vocab.id(&pair[0]), vocab.id(&pair[1]));
                    let next = bigram_ids.len() as u32;
                    bigram_ids.entry(key).or_insert(next);
                }
            }
        }
        Ok(BowSpace {
            vocab,
            bigram_ids,
            use_bigrams,
        })
    }

    pub fn dim(&self) -> usize {
        self.vocab.size() + self.bigram_ids.len()
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn uses_bigrams(&self) -> bool {
        self.use_bigrams
    }

    /// Count vector for one sentence. Stopwords contribute nothing; tokens
    /// outside the training vocabulary count under the UNK index.
    pub fn vectorize(&self, tokens: &[String]) -> SparseVec {
        let filtered = filter_stopwords(tokens);
        let mut pairs: Vec<(u32, f64)> = Vec::with_capacity(filtered.len());
        for token in &filtered {
            pairs.push((self.vocab.id(token), 1.0));
        }
        if self.use_bigrams {
            let base = self.vocab.size() as u32;
            for pair in filtered.windows(2) {
                let key = (self.vocab.id(&pair[0]), self.vocab.id(&pair[1]));
                if key.0 != UNK_ID && key.1 != UNK_ID {
                    if let Some(&id) = self.bigram_ids.get(&key) {
                        pairs.push((base + id, 1.0));
                    }
                }
            }
        }
        SparseVec::from_pairs(pairs)
    }
}

fn filter_stopwords(tokens: &[String]) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !is_stopword(t))
        .cloned()
        .collect()
}
