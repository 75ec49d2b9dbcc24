//! Output layer: inverted dropout over the sentence vector, affine map to
//! class logits, softmax.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::num::matrix::{gemv_acc, gemv_t_acc, outer_acc};
use crate::num::ops::softmax;

#[derive(Debug, Clone)]
pub struct HeadCache {
    /// Sentence vector after dropout (identical to the input in eval mode).
    pub dropped: Vec<f64>,
    /// Inverted-dropout mask entries (0 or 1/keep); empty in eval mode.
    pub mask: Vec<f64>,
    pub probs: Vec<f64>,
}

/// Train mode applies inverted dropout (survivors scaled by 1/keep), so
/// eval mode needs no rescaling and is a pure function of its inputs.
pub fn head_forward(
    sentence: &[f64],
    w: &[f64],
    b: &[f64],
    classes: usize,
    dropout: Option<(f64, &mut ChaCha8Rng)>,
) -> Result<HeadCache> {
    let mut dropped = sentence.to_vec();
    let mask = match dropout {
        Some((rate, rng)) if rate > 0.0 => {
            let keep = 1.0 - rate;
            let mut mask = vec![0.0; sentence.len()];
            for m in &mut mask {
                if rng.gen_range(0.0..1.0) < keep {
                    *m = 1.0 / keep;
                }
            }
            for (v, &m) in dropped.iter_mut().zip(&mask) {
                *v *= m;
            }
            mask
        }
        _ => Vec::new(),
    };
    let mut logits = b.to_vec();
    gemv_acc(w, classes, sentence.len(), &dropped, &mut logits);
    let probs = softmax(&logits)?;
    Ok(HeadCache {
        dropped,
        mask,
        probs,
    })
}

/// Backward from the logits gradient; returns the gradient with respect to
/// the pre-dropout sentence vector.
pub fn head_backward(
    cache: &HeadCache,
    w: &[f64],
    classes: usize,
    dlogits: &[f64],
    dw: &mut [f64],
    db: &mut [f64],
) -> Vec<f64> {
    let dim = cache.dropped.len();
    outer_acc(dw, classes, dim, dlogits, &cache.dropped);
    for (o, &g) in db.iter_mut().zip(dlogits) {
        *o += g;
    }
    let mut d_sentence = vec![0.0; dim];
    gemv_t_acc(w, classes, dim, dlogits, &mut d_sentence);
    if !cache.mask.is_empty() {
        for (v, &m) in d_sentence.iter_mut().zip(&cache.mask) {
            *v *= m;
        }
    }
    d_sentence
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn zero_affine_gives_uniform_probs_in_eval() {
        let sentence = vec![0.3, -0.7, 1.1];
        let w = vec![0.0; 2 * 3];
        let b = vec![0.0; 2];
        let cache = head_forward(&sentence, &w, &b, 2, None).unwrap();
        assert_eq!(cache.probs, vec![0.5, 0.5]);
    }

    #[test]
    fn eval_mode_is_deterministic() {
        let sentence = vec![0.3, -0.7, 1.1];
        let w = vec![0.1, 0.2, 0.3, -0.1, -0.2, -0.3];
        let b = vec![0.05, -0.05];
        let a = head_forward(&sentence, &w, &b, 2, None).unwrap();
        let b2 = head_forward(&sentence, &w, &b, 2, None).unwrap();
        assert_eq!(a.probs, b2.probs);
    }

    #[test]
    fn train_mode_reproducible_under_seed() {
        let sentence = vec![0.3, -0.7, 1.1, 0.4];
        let w = vec![0.1; 2 * 4];
        let b = vec![0.0; 2];
        let mut r1 = ChaCha8Rng::seed_from_u64(77);
        let mut r2 = ChaCha8Rng::seed_from_u64(77);
        let a = head_forward(&sentence, &w, &b, 2, Some((0.5, &mut r1))).unwrap();
        let c = head_forward(&sentence, &w, &b, 2, Some((0.5, &mut r2))).unwrap();
        assert_eq!(a.probs, c.probs);
        assert_eq!(a.mask, c.mask);
        assert!(a.mask.iter().all(|&m| m == 0.0 || m == 2.0));
    }
}
