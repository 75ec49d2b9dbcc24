//! Forward operations and their hand-derived backward passes.
//!
//! Backward functions take the upstream gradient and return gradients for
//! every differentiable input. All of them are checked against central
//! finite differences in the gradcheck tests.

use crate::error::{Error, Result};
use crate::num::matrix::Matrix;

/// A bank of `count` convolution filters of a fixed `width` over sequences
/// of `input_dim`-dimensional steps. Filter j is stored as row j of
/// `weights`, flattened window-major: weight for (offset u, channel e) sits
/// at column `u * input_dim + e`.
#[derive(Debug, Clone)]
pub struct FilterBank {
    pub width: usize,
    pub count: usize,
    pub input_dim: usize,
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl FilterBank {
    pub fn zeros(width: usize, count: usize, input_dim: usize) -> Self {
        FilterBank {
            width,
            count,
            input_dim,
            weights: Matrix::zeros(count, width * input_dim),
            bias: vec![0.0; count],
        }
    }
}

/// Slide every filter over time: out[t][j] = bias_j + <window(t), filter_j>.
/// Output shape is (T - width + 1, count).
pub fn conv1d_over_time(seq: &Matrix, bank: &FilterBank) -> Result<Matrix> {
    let t_len = seq.rows();
    let d = seq.cols();
    if bank.width == 0 {
        return Err(Error::Usage("filter width must be >= 1".into()));
    }
    if d != bank.input_dim {
        return Err(Error::Dimension {
            op: "conv1d_over_time",
            left: format!("seq dim {d}"),
            right: format!("filter dim {}", bank.input_dim),
        });
    }
    if t_len < bank.width {
        return Err(Error::SequenceTooShort {
            len: t_len,
            width: bank.width,
        });
    }
    let out_len = t_len - bank.width + 1;
    let window = bank.width * d;
    let mut out = Matrix::zeros(out_len, bank.count);
    for t in 0..out_len {
        // Rows t..t+width are contiguous in the row-major sequence.
        let win = &seq.as_slice()[t * d..t * d + window];
        let out_row = out.row_mut(t);
        for j in 0..bank.count {
            let f = bank.weights.row(j);
            let mut acc = bank.bias[j];
            for (a, b) in win.iter().zip(f) {
                acc += a * b;
            }
            out_row[j] = acc;
        }
    }
    Ok(out)
}

/// Gradients of `conv1d_over_time` with respect to the sequence, the filter
/// weights and the biases.
pub fn conv1d_backward(
    seq: &Matrix,
    bank: &FilterBank,
    dout: &Matrix,
) -> (Matrix, Matrix, Vec<f64>) {
    let d = seq.cols();
    let window = bank.width * d;
    let mut dseq = Matrix::zeros(seq.rows(), d);
    let mut dweights = Matrix::zeros(bank.count, window);
    let mut dbias = vec![0.0; bank.count];
    for t in 0..dout.rows() {
        let win_start = t * d;
        for j in 0..bank.count {
            let g = dout.get(t, j);
            if g == 0.0 {
                continue;
            }
            dbias[j] += g;
            let f = bank.weights.row(j);
            let win = &seq.as_slice()[win_start..win_start + window];
            let dw = dweights.row_mut(j);
            for i in 0..window {
                dw[i] += g * win[i];
            }
            let ds = &mut dseq.as_mut_slice()[win_start..win_start + window];
            for i in 0..window {
                ds[i] += g * f[i];
            }
        }
    }
    (dseq, dweights, dbias)
}

/// Per-column maximum over time with the winning row recorded for backward
/// routing. Ties break toward the smallest time index.
pub fn max_over_time(features: &Matrix) -> Result<(Vec<f64>, Vec<usize>)> {
    if features.rows() == 0 {
        return Err(Error::EmptySequence("max_over_time"));
    }
    let k = features.cols();
    let mut best = features.row(0).to_vec();
    let mut arg = vec![0usize; k];
    for t in 1..features.rows() {
        let row = features.row(t);
        for j in 0..k {
            if row[j] > best[j] {
                best[j] = row[j];
                arg[j] = t;
            }
        }
    }
    Ok((best, arg))
}

/// Route the pooled gradient back to the argmax positions only.
pub fn max_over_time_backward(t_len: usize, argmax: &[usize], dpooled: &[f64]) -> Matrix {
    let mut dfeat = Matrix::zeros(t_len, dpooled.len());
    for (j, (&t, &g)) in argmax.iter().zip(dpooled).enumerate() {
        dfeat.set(t, j, g);
    }
    dfeat
}

/// Numerically stable softmax (max-subtracted).
pub fn softmax(logits: &[f64]) -> Result<Vec<f64>> {
    if logits.is_empty() {
        return Err(Error::EmptySequence("softmax"));
    }
    if logits.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("softmax input"));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    for v in &mut out {
        *v /= sum;
    }
    Ok(out)
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[inline]
pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conv_zero_input_passes_bias_through() {
        let seq = Matrix::zeros(4, 2);
        let mut bank = FilterBank::zeros(2, 3, 2);
        bank.bias = vec![0.5; 3];
        let out = conv1d_over_time(&seq, &bank).unwrap();
        assert_eq!(out.rows(), 3);
        assert!(out.as_slice().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn conv_forced_arithmetic() {
        // seq [1,2,3] (T=3, d=1), one width-2 filter [1,-1], bias 0 -> [-1,-1]
        let seq = Matrix::from_vec(3, 1, vec![1.0, 2.0, 3.0]).unwrap();
        let mut bank = FilterBank::zeros(2, 1, 1);
        bank.weights = Matrix::from_vec(1, 2, vec![1.0, -1.0]).unwrap();
        let out = conv1d_over_time(&seq, &bank).unwrap();
        assert_eq!(out.as_slice(), &[-1.0, -1.0]);
    }

    #[test]
    fn conv_matches_sliding_window_oracle() {
        // Oracle: explicit 4-deep loop straight from the definition.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (t_len, d, w, k) = (7, 4, 3, 5);
        let seq =
            Matrix::from_vec(t_len, d, (0..t_len * d).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .unwrap();
        let mut bank = FilterBank::zeros(w, k, d);
        bank.weights =
            Matrix::from_vec(k, w * d, (0..k * w * d).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .unwrap();
        bank.bias = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let fast = conv1d_over_time(&seq, &bank).unwrap();
        for t in 0..t_len - w + 1 {
            for j in 0..k {
                let mut acc = bank.bias[j];
                for u in 0..w {
                    for e in 0..d {
                        acc += seq.get(t + u, e) * bank.weights.get(j, u * d + e);
                    }
                }
                assert!((fast.get(t, j) - acc).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn conv_too_short_errors() {
        let seq = Matrix::zeros(2, 3);
        let bank = FilterBank::zeros(4, 1, 3);
        assert!(matches!(
            conv1d_over_time(&seq, &bank),
            Err(Error::SequenceTooShort { len: 2, width: 4 })
        ));
    }

    #[test]
    fn conv_time_shift_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = 3;
        let body: Vec<f64> = (0..5 * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut bank = FilterBank::zeros(2, 2, d);
        bank.weights =
            Matrix::from_vec(2, 2 * d, (0..4 * d).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .unwrap();
        // Same content placed at offset 0 and offset 2 inside a zero canvas.
        let mut a = vec![0.0; 9 * d];
        a[..5 * d].copy_from_slice(&body);
        let mut b = vec![0.0; 9 * d];
        b[2 * d..7 * d].copy_from_slice(&body);
        let out_a = conv1d_over_time(&Matrix::from_vec(9, d, a).unwrap(), &bank).unwrap();
        let out_b = conv1d_over_time(&Matrix::from_vec(9, d, b).unwrap(), &bank).unwrap();
        for t in 0..4 {
            for j in 0..2 {
                assert_eq!(out_a.get(t, j), out_b.get(t + 2, j));
            }
        }
    }

    #[test]
    fn maxpool_basics() {
        let m = Matrix::from_vec(3, 1, vec![1.0, 5.0, 3.0]).unwrap();
        let (v, arg) = max_over_time(&m).unwrap();
        assert_eq!(v, vec![5.0]);
        assert_eq!(arg, vec![1]);

        let c = Matrix::from_vec(4, 2, vec![2.0; 8]).unwrap();
        let (v, arg) = max_over_time(&c).unwrap();
        assert_eq!(v, vec![2.0, 2.0]);
        assert_eq!(arg, vec![0, 0], "ties break toward the smallest index");

        assert!(matches!(
            max_over_time(&Matrix::zeros(0, 3)),
            Err(Error::EmptySequence(_))
        ));
    }

    #[test]
    fn maxpool_row_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m =
            Matrix::from_vec(6, 3, (0..18).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let (v, _) = max_over_time(&m).unwrap();
        let perm = [3usize, 0, 5, 1, 4, 2];
        let rows: Vec<Vec<f64>> = perm.iter().map(|&i| m.row(i).to_vec()).collect();
        let (v2, _) = max_over_time(&Matrix::from_rows(&rows).unwrap()).unwrap();
        assert_eq!(v, v2);
    }

    #[test]
    fn softmax_cases() {
        assert_eq!(softmax(&[0.0, 0.0]).unwrap(), vec![0.5, 0.5]);

        let p = softmax(&[(2.0f64).ln(), 0.0]).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-12);

        let p = softmax(&[1000.0, 0.0]).unwrap();
        assert!(p[0] > 1.0 - 1e-12 && p[1] < 1e-12);
        assert!(p.iter().all(|v| v.is_finite()));

        assert!(matches!(
            softmax(&[f64::NAN, 0.0]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn softmax_sums_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let logits: Vec<f64> = (0..5).map(|_| rng.gen_range(-30.0..30.0)).collect();
            let p = softmax(&logits).unwrap();
            let sum: f64 = p.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }
}
