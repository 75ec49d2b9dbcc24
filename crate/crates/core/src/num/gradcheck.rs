//! Central finite-difference verification of backward passes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::num::matrix::Matrix;
use crate::num::ops;

/// An operation with a forward map and a hand-derived backward map.
///
/// `backward` receives the original inputs and the gradient of some scalar
/// objective with respect to the output, and must return that objective's
/// gradient with respect to every input, in input order.
pub trait DifferentiableOp {
    fn forward(&self, inputs: &[Matrix]) -> Result<Matrix>;
    fn backward(&self, inputs: &[Matrix], out_grad: &Matrix) -> Result<Vec<Matrix>>;
}

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub passed: bool,
    pub worst_rel_err: f64,
    /// (input index, flat element index) where the worst error occurred.
    pub worst_at: (usize, usize),
}

/// Compare `op.backward` against central finite differences.
///
/// The output is contracted with a fixed random cotangent so the check
/// reduces to a scalar objective; element (i, j) of the numeric gradient is
/// (s(x+h e) - s(x-h e)) / 2h. Relative error per element is
/// |a-n| / max(1e-8, |a|+|n|).
pub fn grad_check(
    op: &dyn DifferentiableOp,
    inputs: &[Matrix],
    step: f64,
    tol: f64,
    seed: u64,
) -> Result<GradCheckReport> {
    if step <= 0.0 {
        return Err(Error::Usage("grad_check step must be > 0".into()));
    }
    let base = op.forward(inputs)?;
    let again = op.forward(inputs)?;
    if base.as_slice() != again.as_slice() {
        return Err(Error::Usage(
            "grad_check requires a deterministic forward (fix any dropout mask first)".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cotangent = Matrix::zeros(base.rows(), base.cols());
    for v in cotangent.as_mut_slice() {
        *v = rng.gen_range(-1.0..1.0);
    }

    let analytic = op.backward(inputs, &cotangent)?;
    if analytic.len() != inputs.len() {
        return Err(Error::Usage(format!(
            "backward returned {} gradients for {} inputs",
            analytic.len(),
            inputs.len()
        )));
    }

    let objective = |xs: &[Matrix]| -> Result<f64> {
        let out = op.forward(xs)?;
        Ok(out
            .as_slice()
            .iter()
            .zip(cotangent.as_slice())
            .map(|(a, b)| a * b)
            .sum())
    };

    let mut worst = 0.0f64;
    let mut worst_at = (0usize, 0usize);
    let mut work: Vec<Matrix> = inputs.to_vec();
    for i in 0..inputs.len() {
        for j in 0..inputs[i].len() {
            let orig = work[i].as_slice()[j];
            work[i].as_mut_slice()[j] = orig + step;
            let plus = objective(&work)?;
            work[i].as_mut_slice()[j] = orig - step;
            let minus = objective(&work)?;
            work[i].as_mut_slice()[j] = orig;
            let numeric = (plus - minus) / (2.0 * step);
            let a = analytic[i].as_slice()[j];
            let rel = (a - numeric).abs() / f64::max(1e-8, a.abs() + numeric.abs());
            if rel > worst {
                worst = rel;
                worst_at = (i, j);
            }
        }
    }

    Ok(GradCheckReport {
        passed: worst <= tol,
        worst_rel_err: worst,
        worst_at,
    })
}

/// matmul as a checkable op over both factors.
pub struct MatmulOp;

impl DifferentiableOp for MatmulOp {
    fn forward(&self, inputs: &[Matrix]) -> Result<Matrix> {
        inputs[0].matmul(&inputs[1])
    }

    fn backward(&self, inputs: &[Matrix], out_grad: &Matrix) -> Result<Vec<Matrix>> {
        let da = out_grad.matmul(&inputs[1].transpose())?;
        let db = inputs[0].transpose().matmul(out_grad)?;
        Ok(vec![da, db])
    }
}

/// conv1d_over_time as a checkable op over (sequence, weights, bias).
pub struct Conv1dOp {
    pub width: usize,
    pub count: usize,
    pub input_dim: usize,
}

impl Conv1dOp {
    fn bank(&self, inputs: &[Matrix]) -> ops::FilterBank {
        ops::FilterBank {
            width: self.width,
            count: self.count,
            input_dim: self.input_dim,
            weights: inputs[1].clone(),
            bias: inputs[2].as_slice().to_vec(),
        }
    }
}

impl DifferentiableOp for Conv1dOp {
    fn forward(&self, inputs: &[Matrix]) -> Result<Matrix> {
        ops::conv1d_over_time(&inputs[0], &self.bank(inputs))
    }

    fn backward(&self, inputs: &[Matrix], out_grad: &Matrix) -> Result<Vec<Matrix>> {
        let bank = self.bank(inputs);
        let (dseq, dweights, dbias) = ops::conv1d_backward(&inputs[0], &bank, out_grad);
        Ok(vec![
            dseq,
            dweights,
            Matrix::from_vec(1, bank.count, dbias)?,
        ])
    }
}

/// max_over_time as a checkable op (output is the 1 x k pooled vector).
pub struct MaxPoolOp;

impl DifferentiableOp for MaxPoolOp {
    fn forward(&self, inputs: &[Matrix]) -> Result<Matrix> {
        let (pooled, _) = ops::max_over_time(&inputs[0])?;
        Matrix::from_vec(1, pooled.len(), pooled)
    }

    fn backward(&self, inputs: &[Matrix], out_grad: &Matrix) -> Result<Vec<Matrix>> {
        let (_, argmax) = ops::max_over_time(&inputs[0])?;
        Ok(vec![ops::max_over_time_backward(
            inputs[0].rows(),
            &argmax,
            out_grad.as_slice(),
        )])
    }
}

/// softmax followed by cross-entropy against a fixed gold class, as a
/// checkable op over the logits. Output is the 1x1 loss.
pub struct SoftmaxXentOp {
    pub gold: usize,
}

impl DifferentiableOp for SoftmaxXentOp {
    fn forward(&self, inputs: &[Matrix]) -> Result<Matrix> {
        let probs = ops::softmax(inputs[0].as_slice())?;
        Matrix::from_vec(1, 1, vec![-probs[self.gold].max(1e-300).ln()])
    }

    fn backward(&self, inputs: &[Matrix], out_grad: &Matrix) -> Result<Vec<Matrix>> {
        let probs = ops::softmax(inputs[0].as_slice())?;
        let g = out_grad.as_slice()[0];
        let mut d: Vec<f64> = probs.iter().map(|&p| g * p).collect();
        d[self.gold] -= g;
        Ok(vec![Matrix::from_vec(1, inputs[0].len(), d)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for v in m.as_mut_slice() {
            *v = rng.gen_range(-1.0..1.0);
        }
        m
    }

    #[test]
    fn matmul_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(2, 3, &mut rng);
        let b = random_matrix(3, 2, &mut rng);
        let report = grad_check(&MatmulOp, &[a, b], 1e-5, 1e-6, 42).unwrap();
        assert!(report.passed, "worst {}", report.worst_rel_err);
    }

    #[test]
    fn softmax_xent_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let logits = random_matrix(1, 4, &mut rng);
        let report = grad_check(&SoftmaxXentOp { gold: 2 }, &[logits], 1e-5, 1e-6, 43).unwrap();
        assert!(report.passed, "worst {}", report.worst_rel_err);
    }

    #[test]
    fn corrupted_backward_fails() {
        struct Corrupted;
        impl DifferentiableOp for Corrupted {
            fn forward(&self, inputs: &[Matrix]) -> Result<Matrix> {
                MatmulOp.forward(inputs)
            }
            fn backward(&self, inputs: &[Matrix], out_grad: &Matrix) -> Result<Vec<Matrix>> {
                let mut grads = MatmulOp.backward(inputs, out_grad)?;
                grads[0].as_mut_slice()[0] += 0.1;
                Ok(grads)
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(2, 2, &mut rng);
        let b = random_matrix(2, 2, &mut rng);
        let report = grad_check(&Corrupted, &[a, b], 1e-5, 1e-5, 44).unwrap();
        assert!(!report.passed);
        assert_eq!(report.worst_at.0, 0);
    }

    #[test]
    fn conv_and_pool_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let seq = random_matrix(6, 3, &mut rng);
        let weights = random_matrix(2, 2 * 3, &mut rng);
        let bias = random_matrix(1, 2, &mut rng);
        let op = Conv1dOp {
            width: 2,
            count: 2,
            input_dim: 3,
        };
        let report = grad_check(&op, &[seq.clone(), weights, bias], 1e-5, 1e-6, 45).unwrap();
        assert!(report.passed, "conv worst {}", report.worst_rel_err);

        let report = grad_check(&MaxPoolOp, &[seq], 1e-5, 1e-6, 46).unwrap();
        assert!(report.passed, "pool worst {}", report.worst_rel_err);
    }

    #[test]
    fn rejects_nondeterministic_forward() {
        use std::cell::Cell;
        struct Flaky(Cell<f64>);
        impl DifferentiableOp for Flaky {
            fn forward(&self, _inputs: &[Matrix]) -> Result<Matrix> {
                self.0.set(self.0.get() + 1.0);
                Matrix::from_vec(1, 1, vec![self.0.get()])
            }
            fn backward(&self, _inputs: &[Matrix], _g: &Matrix) -> Result<Vec<Matrix>> {
                Ok(vec![Matrix::zeros(1, 1)])
            }
        }
        let err = grad_check(&Flaky(Cell::new(0.0)), &[Matrix::zeros(1, 1)], 1e-5, 1e-5, 0);
        assert!(matches!(err, Err(Error::Usage(_))));
    }
}
