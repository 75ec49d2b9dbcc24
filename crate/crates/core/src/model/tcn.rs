//! Temporal convolutional sentence encoder.
//!
//! A stack of residual blocks, one causal dilated convolution per block:
//! conv -> ReLU -> dropout, plus a skip connection (identity, or a 1x1
//! projection on the first block where channel counts differ). Left
//! padding of (kernel - 1) * dilation keeps every output strictly causal.
//! The sentence vector is the channel vector at the last real time step.

use crate::num::Matrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Weights for one block: `w` is (kernel * c_in) x c_out with tap u and
/// input channel ci at row u * c_in + ci; `bias` has c_out entries.
#[derive(Debug, Clone, Copy)]
pub struct TcnBlockWeights<'a> {
    pub w: &'a [f64],
    pub bias: &'a [f64],
    pub c_in: usize,
    pub c_out: usize,
    pub kernel: usize,
    pub dilation: usize,
}

#[derive(Debug, Clone)]
pub struct TcnCache {
    /// Input of each block (block 0's input is the embedded sequence).
    pub inputs: Vec<Matrix>,
    /// Pre-ReLU convolution outputs per block.
    pub pre_act: Vec<Matrix>,
    /// Inverted-dropout masks per block (empty when dropout is off).
    pub masks: Vec<Vec<f64>>,
    pub output: Matrix,
}

fn causal_conv(x: &Matrix, w: &TcnBlockWeights) -> Matrix {
    let t_len = x.rows();
    let mut out = Matrix::zeros(t_len, w.c_out);
    for t in 0..t_len {
        let row = out.row_mut(t);
        row.copy_from_slice(w.bias);
        for u in 0..w.kernel {
            let reach = (w.kernel - 1 - u) * w.dilation;
            if reach > t {
                continue; // left padding: implicit zeros
            }
            let src = x.row(t - reach);
            let w_tap = &w.w[u * w.c_in * w.c_out..(u + 1) * w.c_in * w.c_out];
            for (ci, &xv) in src.iter().enumerate() {
                if xv == 0.0 {
                    continue;
                }
                let w_row = &w_tap[ci * w.c_out..(ci + 1) * w.c_out];
                for (o, &wv) in row.iter_mut().zip(w_row) {
                    *o += xv * wv;
                }
            }
        }
    }
    out
}

/// Forward over all blocks. `proj` is the 1x1 residual projection for the
/// first block (required when the embedding dim differs from the channel
/// count). `dropout` carries (rate, rng) in training mode.
pub fn tcn_forward(
    seq: &Matrix,
    blocks: &[TcnBlockWeights],
    proj: Option<&[f64]>,
    dropout: Option<(f64, &mut ChaCha8Rng)>,
) -> (Vec<f64>, TcnCache) {
    let mut cache = TcnCache {
        inputs: Vec::with_capacity(blocks.len()),
        pre_act: Vec::with_capacity(blocks.len()),
        masks: Vec::with_capacity(blocks.len()),
        output: Matrix::zeros(0, 0),
    };
    let mut dropout = dropout;
    let mut x = seq.clone();
    for (b, w) in blocks.iter().enumerate() {
        let pre = causal_conv(&x, w);
        let mut branch = pre.clone();
        for v in branch.as_mut_slice() {
            *v = v.max(0.0);
        }
        let mask = match &mut dropout {
            Some((rate, rng)) if *rate > 0.0 => {
                let keep = 1.0 - *rate;
                let mut mask = vec![0.0; branch.len()];
                for m in &mut mask {
                    if rng.gen_range(0.0..1.0) < keep {
                        *m = 1.0 / keep;
                    }
                }
                for (v, &m) in branch.as_mut_slice().iter_mut().zip(&mask) {
                    *v *= m;
                }
                mask
            }
            _ => Vec::new(),
        };
        let mut out = branch;
        if b == 0 && w.c_in != w.c_out {
            let p = proj.expect("projection weights required when c_in != c_out");
            for t in 0..x.rows() {
                let src = x.row(t);
                let dst = out.row_mut(t);
                for (ci, &xv) in src.iter().enumerate() {
                    if xv == 0.0 {
                        continue;
                    }
                    let p_row = &p[ci * w.c_out..(ci + 1) * w.c_out];
                    for (o, &pv) in dst.iter_mut().zip(p_row) {
                        *o += xv * pv;
                    }
                }
            }
        } else {
            for (o, &xv) in out.as_mut_slice().iter_mut().zip(x.as_slice()) {
                *o += xv;
            }
        }
        cache.inputs.push(x);
        cache.pre_act.push(pre);
        cache.masks.push(mask);
        x = out;
    }
    let sentence = x.row(x.rows() - 1).to_vec();
    cache.output = x;
    (sentence, cache)
}

/// Backward from a gradient on the last-step channel vector. Per-block
/// weight gradients accumulate into `block_grads` (same order as blocks),
/// the projection gradient into `dproj`; returns the input-sequence
/// gradient.
pub fn tcn_backward(
    blocks: &[TcnBlockWeights],
    cache: &TcnCache,
    d_sentence: &[f64],
    mut block_grads: Vec<(&mut [f64], &mut [f64])>,
    mut dproj: Option<&mut [f64]>,
    proj: Option<&[f64]>,
) -> Matrix {
    let t_len = cache.output.rows();
    let mut d_out = Matrix::zeros(t_len, cache.output.cols());
    d_out.row_mut(t_len - 1).copy_from_slice(d_sentence);

    for (b, w) in blocks.iter().enumerate().rev() {
        let x = &cache.inputs[b];
        let pre = &cache.pre_act[b];
        let mask = &cache.masks[b];
        let (dw, dbias) = &mut block_grads[b];

        // Branch gradient: through dropout scaling and the ReLU mask.
        let mut d_branch = d_out.clone();
        if !mask.is_empty() {
            for (v, &m) in d_branch.as_mut_slice().iter_mut().zip(mask) {
                *v *= m;
            }
        }
        for (v, &p) in d_branch.as_mut_slice().iter_mut().zip(pre.as_slice()) {
            if p <= 0.0 {
                *v = 0.0;
            }
        }

        // Skip-path gradient.
        let mut d_x = Matrix::zeros(x.rows(), x.cols());
        if b == 0 && w.c_in != w.c_out {
            let p = proj.expect("projection weights required");
            let dp = dproj.as_deref_mut().expect("projection gradient slot required");
            for t in 0..t_len {
                let g = d_out.row(t);
                let src = x.row(t);
                let dst = d_x.row_mut(t);
                for ci in 0..w.c_in {
                    let p_row = &p[ci * w.c_out..(ci + 1) * w.c_out];
                    let mut acc = 0.0;
                    for (gv, pv) in g.iter().zip(p_row) {
                        acc += gv * pv;
                    }
                    dst[ci] += acc;
                    let xv = src[ci];
                    if xv != 0.0 {
                        let dp_row = &mut dp[ci * w.c_out..(ci + 1) * w.c_out];
                        for (o, &gv) in dp_row.iter_mut().zip(g) {
                            *o += xv * gv;
                        }
                    }
                }
            }
        } else {
            for (o, &gv) in d_x.as_mut_slice().iter_mut().zip(d_out.as_slice()) {
                *o += gv;
            }
        }

        // Convolution gradient.
        for t in 0..t_len {
            let g = d_branch.row(t);
            if g.iter().all(|&v| v == 0.0) {
                continue;
            }
            for (o, &gv) in dbias.iter_mut().zip(g) {
                *o += gv;
            }
            for u in 0..w.kernel {
                let reach = (w.kernel - 1 - u) * w.dilation;
                if reach > t {
                    continue;
                }
                let src = x.row(t - reach);
                let dst = d_x.row_mut(t - reach);
                let w_tap = &w.w[u * w.c_in * w.c_out..(u + 1) * w.c_in * w.c_out];
                let dw_tap = &mut dw[u * w.c_in * w.c_out..(u + 1) * w.c_in * w.c_out];
                for ci in 0..w.c_in {
                    let w_row = &w_tap[ci * w.c_out..(ci + 1) * w.c_out];
                    let mut acc = 0.0;
                    for (gv, wv) in g.iter().zip(w_row) {
                        acc += gv * wv;
                    }
                    dst[ci] += acc;
                    let xv = src[ci];
                    if xv != 0.0 {
                        let dw_row = &mut dw_tap[ci * w.c_out..(ci + 1) * w.c_out];
                        for (o, &gv) in dw_row.iter_mut().zip(g) {
                            *o += xv * gv;
                        }
                    }
                }
            }
        }
        d_out = d_x;
    }
    d_out
}
