//! Vocabulary with reserved PAD/UNK ids, built from the training split of
//! the active fold only — test tokens never enter it.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub const PAD_ID: u32 = 0;
pub const UNK_ID: u32 = 1;
pub const PAD_TOKEN: &str = "<pad>";
pub const UNK_TOKEN: &str = "<unk>";

#[derive(Debug, Clone)]
pub struct Vocabulary {
    token_to_id: HashMap<String, u32>,
    id_to_token: Vec<String>,
}

impl Vocabulary {
    /// Build from training sentences, assigning dense ids in first-seen
    /// order after the reserved PAD/UNK slots. The tokenizer can never
    /// produce the angle-bracketed reserved tokens, so no collision checks
    /// are needed.
    pub fn build<'a, I, S>(sentences: I) -> Result<Vocabulary>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = &'a String>,
    {
        let mut vocab = Vocabulary {
            token_to_id: HashMap::new(),
            id_to_token: vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string()],
        };
        let mut saw_any = false;
        for sentence in sentences {
            saw_any = true;
            for token in sentence {
                if !vocab.token_to_id.contains_key(token) {
                    let id = vocab.id_to_token.len() as u32;
                    vocab.token_to_id.insert(token.clone(), id);
                    vocab.id_to_token.push(token.clone());
                }
            }
        }
        if !saw_any {
            return Err(Error::Data("cannot build a vocabulary from an empty corpus".into()));
        }
        Ok(vocab)
    }

    pub fn size(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.token_to_id.contains_key(token)
    }

    pub fn id(&self, token: &str) -> u32 {
        self.token_to_id.get(token).copied().unwrap_or(UNK_ID)
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.id_to_token.get(id as usize).map(|s| s.as_str())
    }

    /// Tokens in id order, including the reserved ones.
    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }

    /// Rebuild from an id-ordered token list (checkpoint loading).
    pub fn from_tokens(tokens: Vec<String>) -> Result<Vocabulary> {
        if tokens.len() < 2 || tokens[0] != PAD_TOKEN || tokens[1] != UNK_TOKEN {
            return Err(Error::Integrity(
                "vocabulary list must start with the reserved pad/unk tokens".into(),
            ));
        }
        let token_to_id = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Ok(Vocabulary {
            token_to_id,
            id_to_token: tokens,
        })
    }

    /// Map a cropped token sequence to ids; unseen tokens become UNK.
    pub fn encode(&self, tokens: &[String]) -> Result<Vec<u32>> {
        if tokens.is_empty() {
            return Err(Error::EmptySequence("encode"));
        }
        Ok(tokens.iter().map(|t| self.id(t)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn counting_with_reserved_ids() {
        let sents = [s(&["a", "b"]), s(&["b", "c"])];
        let v = Vocabulary::build(sents.iter()).unwrap();
        assert_eq!(v.size(), 5); // pad, unk, a, b, c
        assert_eq!(v.id("a"), 2);
        assert_eq!(v.id("b"), 3);
        assert_eq!(v.id("c"), 4);
    }

    #[test]
    fn unseen_token_is_unk() {
        let sents = [s(&["a"])];
        let v = Vocabulary::build(sents.iter()).unwrap();
        assert_eq!(v.id("never-seen"), UNK_ID);
        assert_eq!(v.encode(&s(&["a", "zzz"])).unwrap(), vec![2, UNK_ID]);
    }

    #[test]
    fn per_fold_vocabularies_differ() {
        let fold_a = [s(&["alpha"])];
        let fold_b = [s(&["beta", "gamma"])];
        let va = Vocabulary::build(fold_a.iter()).unwrap();
        let vb = Vocabulary::build(fold_b.iter()).unwrap();
        assert_ne!(va.size(), vb.size());
        assert!(!vb.contains("alpha"));
    }

    #[test]
    fn empty_corpus_errors() {
        let none: Vec<Vec<String>> = vec![];
        assert!(Vocabulary::build(none.iter()).is_err());
    }

    #[test]
    fn empty_sentence_encode_errors() {
        let sents = [s(&["a"])];
        let v = Vocabulary::build(sents.iter()).unwrap();
        assert!(v.encode(&[]).is_err());
    }

    #[test]
    fn token_list_round_trip() {
        let sents = [s(&["x", "y"])];
        let v = Vocabulary::build(sents.iter()).unwrap();
        let rebuilt = Vocabulary::from_tokens(v.tokens().to_vec()).unwrap();
        assert_eq!(rebuilt.id("y"), v.id("y"));
    }
}
