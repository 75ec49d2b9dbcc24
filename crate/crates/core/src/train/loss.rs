//! Cross-entropy loss over softmax probabilities.

/// Probability floor: a gold probability of exactly zero would make the
/// loss infinite, so it is clamped and the event counted.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LossOut {
    pub loss: f64,
    /// Gradient with respect to the logits: probs - onehot(gold).
    pub dlogits: Vec<f64>,
    pub clamped: bool,
}

/// loss = -ln(probs[gold]); the logits gradient comes out in closed form
/// because the probabilities are softmax outputs.
pub fn cross_entropy(probs: &[f64], gold: usize) -> LossOut {
    let p = probs[gold];
    let clamped = p < PROB_FLOOR;
    let loss = -p.max(PROB_FLOOR).ln();
    let mut dlogits = probs.to_vec();
    dlogits[gold] -= 1.0;
    LossOut {
        loss,
        dlogits,
        clamped,
    }
}
