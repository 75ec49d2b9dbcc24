//! Convolutional sentence encoder: per-width filter banks, max-over-time
//! pooling, pooled vectors concatenated.

use crate::error::Result;
use crate::num::ops::{conv1d_over_time, max_over_time, FilterBank};
use crate::num::Matrix;

#[derive(Debug, Clone)]
pub struct CnnCache {
    pub padded: Matrix,
    pub real_rows: usize,
    pub argmaxes: Vec<Vec<usize>>,
}

/// Pad with zero rows up to the widest filter (PAD embeddings are zero, so
/// literal zero rows are the same thing), convolve each bank, pool each
/// filter over every window position, concatenate.
pub fn cnn_forward(seq: &Matrix, banks: &[FilterBank]) -> Result<(Vec<f64>, CnnCache)> {
    let max_width = banks.iter().map(|b| b.width).max().unwrap_or(1);
    let real_rows = seq.rows();
    let padded = if real_rows < max_width {
        let mut padded = Matrix::zeros(max_width, seq.cols());
        padded.as_mut_slice()[..real_rows * seq.cols()].copy_from_slice(seq.as_slice());
        padded
    } else {
        seq.clone()
    };
    let mut pooled = Vec::new();
    let mut argmaxes = Vec::with_capacity(banks.len());
    for bank in banks {
        let conv = conv1d_over_time(&padded, bank)?;
        let (vec, argmax) = max_over_time(&conv)?;
        pooled.extend(vec);
        argmaxes.push(argmax);
    }
    Ok((
        pooled,
        CnnCache {
            padded,
            real_rows,
            argmaxes,
        },
    ))
}

/// Backward through pooling and convolution. Max pooling routes each
/// filter's gradient to exactly one window, so the work per filter is one
/// window, not one convolution. Weight/bias gradients accumulate into the
/// provided per-bank slices; the returned matrix is the gradient for the
/// real (unpadded) rows of the input.
pub fn cnn_backward(
    cache: &CnnCache,
    banks: &[FilterBank],
    d_pooled: &[f64],
    mut bank_grads: Vec<(&mut [f64], &mut [f64])>,
) -> Matrix {
    let d = cache.padded.cols();
    let mut dpadded = Matrix::zeros(cache.padded.rows(), d);
    let mut offset = 0;
    for (bi, bank) in banks.iter().enumerate() {
        let window = bank.width * d;
        let (dweights, dbias) = &mut bank_grads[bi];
        for j in 0..bank.count {
            let g = d_pooled[offset + j];
            if g == 0.0 {
                continue;
            }
            let t = cache.argmaxes[bi][j];
            dbias[j] += g;
            let win = &cache.padded.as_slice()[t * d..t * d + window];
            let dw = &mut dweights[j * window..(j + 1) * window];
            for (o, &x) in dw.iter_mut().zip(win) {
                *o += g * x;
            }
            let filter = bank.weights.row(j);
            let ds = &mut dpadded.as_mut_slice()[t * d..t * d + window];
            for (o, &fw) in ds.iter_mut().zip(filter) {
                *o += g * fw;
            }
        }
        offset += bank.count;
    }
    // Gradients on synthetic pad rows fall away: pads are constants.
    let mut dseq = Matrix::zeros(cache.real_rows, d);
    let keep = cache.real_rows * d;
    dseq.as_mut_slice()
        .copy_from_slice(&dpadded.as_slice()[..keep]);
    dseq
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_banks(d: usize) -> Vec<FilterBank> {
        vec![FilterBank::zeros(2, 2, d), FilterBank::zeros(3, 2, d)]
    }

    #[test]
    fn zero_everything_gives_zero_vector() {
        let seq = Matrix::zeros(4, 3);
        let (pooled, _) = cnn_forward(&seq, &zero_banks(3)).unwrap();
        assert_eq!(pooled, vec![0.0; 4]);
    }

    #[test]
    fn short_sentence_padded_to_widest_filter() {
        let seq = Matrix::from_vec(2, 3, vec![0.5; 6]).unwrap();
        let (_, cache) = cnn_forward(&seq, &zero_banks(3)).unwrap();
        assert_eq!(cache.padded.rows(), 3);
        assert_eq!(cache.real_rows, 2);
        // Pad rows are zero.
        assert!(cache.padded.row(2).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dominant_window_position_does_not_matter() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let d = 2;
        let mut bank = FilterBank::zeros(2, 1, d);
        bank.weights = Matrix::from_vec(1, 2 * d, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        // A strongly positive bigram inside otherwise negative noise keeps
        // the same pooled value wherever it sits.
        let mut make = |pos: usize| {
            let mut rows = vec![];
            for t in 0..6 {
                if t == pos || t == pos + 1 {
                    rows.push(vec![5.0, 5.0]);
                } else {
                    rows.push(vec![rng.gen_range(-1.0..0.0), rng.gen_range(-1.0..0.0)]);
                }
            }
            Matrix::from_rows(&rows).unwrap()
        };
        let (a, _) = cnn_forward(&make(0), &[bank.clone()]).unwrap();
        let (b, _) = cnn_forward(&make(3), &[bank]).unwrap();
        assert_eq!(a, b);
    }
}
