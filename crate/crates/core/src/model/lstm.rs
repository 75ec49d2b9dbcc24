//! LSTM and BiLSTM sentence encoders with backpropagation through time.
//!
//! Gate weights are fused: `w_x` is (4H x d) and `w_h` is (4H x H) with
//! gate blocks in i, f, g, o row order. The sentence vector is the hidden
//! state at the last real time step; the bidirectional variant concatenates
//! the forward pass's last state with the backward pass's state at the
//! first real token.

use crate::num::matrix::{gemv_acc, gemv_t_acc, outer_acc, Matrix};
use crate::num::ops::sigmoid;

#[derive(Debug, Clone, Copy)]
pub struct LstmWeights<'a> {
    pub w_x: &'a [f64],
    pub w_h: &'a [f64],
    pub b: &'a [f64],
    pub hidden: usize,
    pub input_dim: usize,
}

#[derive(Debug, Clone)]
pub struct LstmCache {
    hidden: usize,
    t_len: usize,
    /// Activated gate values per step, T x 4H in i|f|g|o blocks.
    gates: Vec<f64>,
    /// Cell states per step, T x H.
    cells: Vec<f64>,
    /// tanh(c_t) per step, T x H.
    tanh_cells: Vec<f64>,
    /// Hidden states per step, T x H.
    hiddens: Vec<f64>,
}

impl LstmCache {
    fn hidden_at(&self, t: usize) -> &[f64] {
        &self.hiddens[t * self.hidden..(t + 1) * self.hidden]
    }

    fn cell_at(&self, t: usize) -> &[f64] {
        &self.cells[t * self.hidden..(t + 1) * self.hidden]
    }
}

/// Run the recurrence over all rows of `seq`; returns the last hidden state
/// and the caches backward needs. Callers pass only real (unpadded) rows.
pub fn lstm_forward(seq: &Matrix, w: &LstmWeights) -> (Vec<f64>, LstmCache) {
    let t_len = seq.rows();
    let h = w.hidden;
    debug_assert_eq!(seq.cols(), w.input_dim);
    let mut cache = LstmCache {
        hidden: h,
        t_len,
        gates: vec![0.0; t_len * 4 * h],
        cells: vec![0.0; t_len * h],
        tanh_cells: vec![0.0; t_len * h],
        hiddens: vec![0.0; t_len * h],
    };
    let mut h_prev = vec![0.0; h];
    let mut c_prev = vec![0.0; h];
    let mut pre = vec![0.0; 4 * h];
    for t in 0..t_len {
        pre.copy_from_slice(w.b);
        gemv_acc(w.w_x, 4 * h, w.input_dim, seq.row(t), &mut pre);
        gemv_acc(w.w_h, 4 * h, h, &h_prev, &mut pre);
        let gates = &mut cache.gates[t * 4 * h..(t + 1) * 4 * h];
        for j in 0..h {
            gates[j] = sigmoid(pre[j]); // i
            gates[h + j] = sigmoid(pre[h + j]); // f
            gates[2 * h + j] = pre[2 * h + j].tanh(); // g
            gates[3 * h + j] = sigmoid(pre[3 * h + j]); // o
        }
        for j in 0..h {
            let c = gates[h + j] * c_prev[j] + gates[j] * gates[2 * h + j];
            let tc = c.tanh();
            cache.cells[t * h + j] = c;
            cache.tanh_cells[t * h + j] = tc;
            cache.hiddens[t * h + j] = gates[3 * h + j] * tc;
        }
        h_prev.copy_from_slice(&cache.hiddens[t * h..(t + 1) * h]);
        c_prev.copy_from_slice(&cache.cells[t * h..(t + 1) * h]);
    }
    (h_prev, cache)
}

/// Backpropagation through time from a gradient on the last hidden state.
/// Weight gradients accumulate into the provided slices; the returned
/// matrix is the gradient with respect to the input sequence.
pub fn lstm_backward(
    seq: &Matrix,
    w: &LstmWeights,
    cache: &LstmCache,
    d_last_hidden: &[f64],
    dw_x: &mut [f64],
    dw_h: &mut [f64],
    db: &mut [f64],
) -> Matrix {
    let h = w.hidden;
    let t_len = cache.t_len;
    let mut dseq = Matrix::zeros(t_len, w.input_dim);
    let mut dh = d_last_hidden.to_vec();
    let mut dc = vec![0.0; h];
    let mut d_act = vec![0.0; 4 * h];
    let zero = vec![0.0; h];
    for t in (0..t_len).rev() {
        let gates = &cache.gates[t * 4 * h..(t + 1) * 4 * h];
        let tanh_c = &cache.tanh_cells[t * h..(t + 1) * h];
        let c_prev = if t == 0 { &zero[..] } else { cache.cell_at(t - 1) };
        for j in 0..h {
            let (i, f, g, o) = (gates[j], gates[h + j], gates[2 * h + j], gates[3 * h + j]);
            let tc = tanh_c[j];
            let d_o = dh[j] * tc;
            let dc_total = dc[j] + dh[j] * o * (1.0 - tc * tc);
            let d_f = dc_total * c_prev[j];
            let d_i = dc_total * g;
            let d_g = dc_total * i;
            d_act[j] = d_i * i * (1.0 - i);
            d_act[h + j] = d_f * f * (1.0 - f);
            d_act[2 * h + j] = d_g * (1.0 - g * g);
            d_act[3 * h + j] = d_o * o * (1.0 - o);
            dc[j] = dc_total * f;
        }
        let h_prev = if t == 0 { &zero[..] } else { cache.hidden_at(t - 1) };
        outer_acc(dw_x, 4 * h, w.input_dim, &d_act, seq.row(t));
        outer_acc(dw_h, 4 * h, h, &d_act, h_prev);
        for (o, &a) in db.iter_mut().zip(&d_act) {
            *o += a;
        }
        gemv_t_acc(w.w_x, 4 * h, w.input_dim, &d_act, dseq.row_mut(t));
        for v in dh.iter_mut() {
            *v = 0.0;
        }
        gemv_t_acc(w.w_h, 4 * h, h, &d_act, &mut dh);
    }
    dseq
}

/// Reverse the rows of a sequence (for the backward direction).
pub fn reverse_rows(seq: &Matrix) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..seq.rows()).rev().map(|t| seq.row(t).to_vec()).collect();
    Matrix::from_rows(&rows).expect("rows share a width")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_weights(hidden: usize, input_dim: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        (
            vec![0.0; 4 * hidden * input_dim],
            vec![0.0; 4 * hidden * hidden],
            vec![0.0; 4 * hidden],
        )
    }

    #[test]
    fn zero_weights_give_zero_output() {
        // Gates sit at 0.5 and the candidate at 0, so the cell never moves
        // and h = 0.5 * tanh(0) = 0.
        let (w_x, w_h, b) = zero_weights(3, 2);
        let w = LstmWeights {
            w_x: &w_x,
            w_h: &w_h,
            b: &b,
            hidden: 3,
            input_dim: 2,
        };
        let seq = Matrix::from_vec(4, 2, vec![1.0; 8]).unwrap();
        let (out, _) = lstm_forward(&seq, &w);
        assert_eq!(out, vec![0.0; 3]);
    }

    #[test]
    fn single_token_is_one_step() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let (h, d) = (3, 2);
        let w_x: Vec<f64> = (0..4 * h * d).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let w_h: Vec<f64> = (0..4 * h * h).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let b: Vec<f64> = (0..4 * h).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let w = LstmWeights {
            w_x: &w_x,
            w_h: &w_h,
            b: &b,
            hidden: h,
            input_dim: d,
        };
        let x = vec![0.3, -0.7];
        let seq = Matrix::from_vec(1, d, x.clone()).unwrap();
        let (out, _) = lstm_forward(&seq, &w);

        // Hand-rolled single step.
        let mut pre = b.clone();
        gemv_acc(&w_x, 4 * h, d, &x, &mut pre);
        for j in 0..h {
            let i = sigmoid(pre[j]);
            let f = pre[h + j]; // unused: c_prev = 0
            let _ = f;
            let g = pre[2 * h + j].tanh();
            let o = sigmoid(pre[3 * h + j]);
            let c = i * g;
            assert!((out[j] - o * c.tanh()).abs() < 1e-14);
        }
    }

    #[test]
    fn reverse_rows_reverses() {
        let m = Matrix::from_vec(3, 1, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(reverse_rows(&m).as_slice(), &[3.0, 2.0, 1.0]);
    }
}
