//! Soft-margin SVM with an RBF kernel, trained by simplified sequential
//! minimal optimization (random second index, seeded). A decision-value
//! cache is updated incrementally after every pair step, and kernel rows
//! are memoized with a bounded cache.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::svm::sparse::SparseVec;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmConfig {
    /// Soft-margin penalty.
    pub c: f64,
    /// RBF width; `None` means 1 / feature-count at training time.
    pub gamma: Option<f64>,
    pub kkt_tol: f64,
    /// Consecutive full passes without an update before stopping.
    pub max_passes: usize,
    /// Hard bound on total passes (safety valve for thrashing data).
    pub max_sweeps: usize,
    pub seed: u64,
    /// Record the dual objective after every pass (debug-grade, O(sv^2)).
    pub track_objective: bool,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            gamma: None,
            kkt_tol: 1e-3,
            max_passes: 10,
            max_sweeps: 500,
            seed: 0,
            track_objective: false,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.c <= 0.0 {
            return Err(Error::Usage(format!("C must be > 0, got {}", self.c)));
        }
        if let Some(g) = self.gamma {
            if g <= 0.0 {
                return Err(Error::Usage(format!("gamma must be > 0, got {g}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmModel {
    pub support: Vec<SparseVec>,
    /// alpha_i * y_i per support vector.
    pub coef: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub dim: usize,
    pub converged: bool,
    /// Largest KKT violation over the training points at termination.
    pub final_kkt_violation: f64,
    /// Dual objective after each pass when tracking was on.
    pub objective_trace: Vec<f64>,
}

pub fn rbf_kernel(x: &SparseVec, y: &SparseVec, gamma: f64) -> f64 {
    (-gamma * x.dist_sq(y)).exp()
}

struct RowCache<'a> {
    xs: &'a [SparseVec],
    gamma: f64,
    rows: HashMap<usize, Vec<f64>>,
    insertion: Vec<usize>,
    cap: usize,
}

impl<'a> RowCache<'a> {
    fn new(xs: &'a [SparseVec], gamma: f64, cap: usize) -> Self {
        RowCache {
            xs,
            gamma,
            rows: HashMap::new(),
            insertion: Vec::new(),
            cap,
        }
    }

    fn row(&mut self, i: usize) -> &[f64] {
        if !self.rows.contains_key(&i) {
            if self.insertion.len() >= self.cap {
                let evict = self.insertion.remove(0);
                self.rows.remove(&evict);
            }
            let row: Vec<f64> = (0..self.xs.len())
                .map(|j| rbf_kernel(&self.xs[i], &self.xs[j], self.gamma))
                .collect();
            self.rows.insert(i, row);
            self.insertion.push(i);
        }
        self.rows.get(&i).expect("row just inserted")
    }
}

fn dual_objective(alphas: &[f64], ys: &[f64], xs: &[SparseVec], gamma: f64) -> f64 {
    let active: Vec<usize> = (0..alphas.len()).filter(|&i| alphas[i] > 0.0).collect();
    let mut quad = 0.0;
    for (ai, &i) in active.iter().enumerate() {
        for &j in &active[ai..] {
            let k = rbf_kernel(&xs[i], &xs[j], gamma);
            let term = alphas[i] * alphas[j] * ys[i] * ys[j] * k;
            quad += if i == j { term } else { 2.0 * term };
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

/// Alphas this close to a box bound count as sitting on it (pair updates
/// can leave float residue of order 1e-17 at a bound).
const ALPHA_EPS: f64 = 1e-10;

/// Largest KKT violation over all training points, for convergence checks.
/// With r_i = y_i f(x_i) - 1: alpha < C requires r >= 0 (violation -r) and
/// alpha > 0 requires r <= 0 (violation r).
fn worst_kkt_violation(alphas: &[f64], ys: &[f64], f: &[f64], c: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..alphas.len() {
        let r = ys[i] * (f[i] - ys[i]);
        if alphas[i] < c - ALPHA_EPS {
            worst = worst.max(-r);
        }
        if alphas[i] > ALPHA_EPS {
            worst = worst.max(r);
        }
    }
    worst
}

/// Train on labels in {-1, +1}. Needs at least one example of each class.
pub fn train_svm(xs: &[SparseVec], ys: &[f64], dim: usize, config: &SvmConfig) -> Result<SvmModel> {
    config.validate()?;
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::Data("svm needs matching, non-empty vectors and labels".into()));
    }
    if ys.iter().any(|&y| y != 1.0 && y != -1.0) {
        return Err(Error::Data("svm labels must be -1 or +1".into()));
    }
    if !ys.contains(&1.0) || !ys.contains(&-1.0) {
        return Err(Error::Data("svm training needs both classes".into()));
    }
    let n = xs.len();
    let gamma = config.gamma.unwrap_or(1.0 / dim.max(1) as f64);
    let c = config.c;
    let tol = config.kkt_tol;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut cache = RowCache::new(xs, gamma, 256);

    let mut alphas = vec![0.0f64; n];
    let mut bias = 0.0f64;
    // f[i] = decision value of x_i under the current dual variables.
    let mut f = vec![0.0f64; n];
    let mut trace = Vec::new();

    let mut quiet_passes = 0usize;
    let mut sweeps = 0usize;
    while quiet_passes < config.max_passes && sweeps < config.max_sweeps {
        let mut changed = 0usize;
        for i in 0..n {
            let e_i = f[i] - ys[i];
            let violates = (ys[i] * e_i < -tol && alphas[i] < c - ALPHA_EPS)
                || (ys[i] * e_i > tol && alphas[i] > ALPHA_EPS);
            if !violates {
                continue;
            }
            // Second index: seeded random start, then cyclic scan until a
            // productive partner turns up (a single random draw stalls on
            // nearly-converged problems).
            let row_i = cache.row(i).to_vec();
            let start = rng.gen_range(0..n);
            for step in 0..n {
                let j = (start + step) % n;
                if j == i {
                    continue;
                }
                let e_j = f[j] - ys[j];
                let (alpha_i_old, alpha_j_old) = (alphas[i], alphas[j]);
                let (lo, hi) = if ys[i] != ys[j] {
                    (
                        (alpha_j_old - alpha_i_old).max(0.0),
                        (c + alpha_j_old - alpha_i_old).min(c),
                    )
                } else {
                    (
                        (alpha_i_old + alpha_j_old - c).max(0.0),
                        (alpha_i_old + alpha_j_old).min(c),
                    )
                };
                if lo >= hi {
                    continue;
                }
                let k_ii = 1.0; // RBF: K(x, x) = 1
                let k_jj = 1.0;
                let k_ij = row_i[j];
                let eta = 2.0 * k_ij - k_ii - k_jj;
                if eta >= 0.0 {
                    continue;
                }
                let mut alpha_j = alpha_j_old - ys[j] * (e_i - e_j) / eta;
                alpha_j = alpha_j.clamp(lo, hi);
                if (alpha_j - alpha_j_old).abs() < 1e-8 {
                    continue;
                }
                let alpha_i = alpha_i_old + ys[i] * ys[j] * (alpha_j_old - alpha_j);

                let b1 = bias - e_i
                    - ys[i] * (alpha_i - alpha_i_old) * k_ii
                    - ys[j] * (alpha_j - alpha_j_old) * k_ij;
                let b2 = bias - e_j
                    - ys[i] * (alpha_i - alpha_i_old) * k_ij
                    - ys[j] * (alpha_j - alpha_j_old) * k_jj;
                let new_bias = if alpha_i > 0.0 && alpha_i < c {
                    b1
                } else if alpha_j > 0.0 && alpha_j < c {
                    b2
                } else {
                    (b1 + b2) / 2.0
                };

                let di = ys[i] * (alpha_i - alpha_i_old);
                let dj = ys[j] * (alpha_j - alpha_j_old);
                let db = new_bias - bias;
                {
                    let row_j = cache.row(j);
                    for t in 0..n {
                        f[t] += di * row_i[t] + dj * row_j[t] + db;
                    }
                }
                alphas[i] = alpha_i;
                alphas[j] = alpha_j;
                bias = new_bias;
                changed += 1;
                break;
            }
        }
        if changed == 0 {
            quiet_passes += 1;
        } else {
            quiet_passes = 0;
        }
        sweeps += 1;
        if config.track_objective {
            trace.push(dual_objective(&alphas, ys, xs, gamma));
        }
    }

    let final_kkt_violation = worst_kkt_violation(&alphas, ys, &f, c);
    let mut support = Vec::new();
    let mut coef = Vec::new();
    for i in 0..n {
        if alphas[i] > ALPHA_EPS {
            support.push(xs[i].clone());
            coef.push(alphas[i] * ys[i]);
        }
    }
    Ok(SvmModel {
        support,
        coef,
        bias,
        gamma,
        dim,
        converged: final_kkt_violation <= tol,
        final_kkt_violation,
        objective_trace: trace,
    })
}

/// Decision value f(x) = sum_i alpha_i y_i K(x_i, x) + b. Used directly as
/// the ranking score for AUCs; no probability calibration.
pub fn predict_decision(model: &SvmModel, x: &SparseVec) -> f64 {
    let mut acc = model.bias;
    for (sv, &coef) in model.support.iter().zip(&model.coef) {
        acc += coef * rbf_kernel(sv, x, model.gamma);
    }
    acc
}

/// Sign of the decision value (ties go positive).
pub fn predict_label(model: &SvmModel, x: &SparseVec) -> f64 {
    if predict_decision(model, x) >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Constraint residuals for invariant checks.
pub fn constraint_report(model: &SvmModel, c: f64) -> (bool, f64) {
    let box_ok = model
        .coef
        .iter()
        .all(|&co| co.abs() > 0.0 && co.abs() <= c + 1e-12);
    let equality = model.coef.iter().sum::<f64>().abs();
    (box_ok, equality)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(i: u32) -> SparseVec {
        SparseVec::from_pairs(vec![(i, 1.0)])
    }

    fn separable_pair() -> (Vec<SparseVec>, Vec<f64>) {
        (vec![unit(0), unit(1)], vec![1.0, -1.0])
    }

    #[test]
    fn kernel_identities() {
        let x = SparseVec::from_pairs(vec![(0, 1.0), (7, 2.0)]);
        let y = SparseVec::from_pairs(vec![(0, 1.0), (7, 1.0)]);
        assert_eq!(rbf_kernel(&x, &x, 0.3), 1.0);
        // |x-y|^2 = 1, gamma = 1 -> e^{-1}
        assert!((rbf_kernel(&x, &y, 1.0) - (-1.0f64).exp()).abs() < 1e-12);
        assert!((rbf_kernel(&x, &y, 1.0) - 0.367879).abs() < 1e-6);
        assert_eq!(rbf_kernel(&x, &y, 0.5), rbf_kernel(&y, &x, 0.5));
    }

    #[test]
    fn two_points_separate() {
        let (xs, ys) = separable_pair();
        let cfg = SvmConfig {
            gamma: Some(1.0),
            ..SvmConfig::default()
        };
        let model = train_svm(&xs, &ys, 2, &cfg).unwrap();
        assert_eq!(model.support.len(), 2);
        assert_eq!(predict_label(&model, &xs[0]), 1.0);
        assert_eq!(predict_label(&model, &xs[1]), -1.0);
        let (box_ok, eq) = constraint_report(&model, cfg.c);
        assert!(box_ok);
        assert!(eq <= 1e-6);
    }

    #[test]
    fn single_class_is_an_error() {
        let xs = vec![unit(0), unit(1)];
        assert!(train_svm(&xs, &[1.0, 1.0], 2, &SvmConfig::default()).is_err());
    }

    #[test]
    fn conflicting_duplicate_labels_terminate() {
        let xs = vec![unit(0), unit(0), unit(1)];
        let ys = vec![1.0, -1.0, -1.0];
        let cfg = SvmConfig {
            gamma: Some(1.0),
            max_passes: 3,
            ..SvmConfig::default()
        };
        let model = train_svm(&xs, &ys, 2, &cfg).unwrap();
        let (box_ok, eq) = constraint_report(&model, cfg.c);
        assert!(box_ok || model.support.is_empty());
        assert!(eq <= 1e-6);
    }

    #[test]
    fn dual_objective_nondecreasing_when_tracked() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..20 {
            let pos = i % 2 == 0;
            let base = if pos { 0 } else { 10 };
            let pairs = vec![
                (base, 1.0 + rng.gen_range(-0.2..0.2)),
                (base + rng.gen_range(1..4), rng.gen_range(0.2..0.8)),
            ];
            xs.push(SparseVec::from_pairs(pairs));
            ys.push(if pos { 1.0 } else { -1.0 });
        }
        let cfg = SvmConfig {
            gamma: Some(0.5),
            track_objective: true,
            ..SvmConfig::default()
        };
        let model = train_svm(&xs, &ys, 16, &cfg).unwrap();
        assert!(model.converged);
        assert!(model.objective_trace.len() >= 2);
        for w in model.objective_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "objective decreased: {w:?}");
        }
    }

    #[test]
    fn prediction_is_deterministic_and_finite_on_zero_vector() {
        let (xs, ys) = separable_pair();
        let cfg = SvmConfig {
            gamma: Some(1.0),
            ..SvmConfig::default()
        };
        let model = train_svm(&xs, &ys, 2, &cfg).unwrap();
        let zero = SparseVec::new();
        let a = predict_decision(&model, &zero);
        let b = predict_decision(&model, &zero);
        assert_eq!(a, b);
        assert!(a.is_finite());
    }
}
