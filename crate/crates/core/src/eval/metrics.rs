//! Binary-classification metrics and their brute-force oracles.
//!
//! The fast paths (`roc_auc`, `pr_auc`) are what the pipeline uses; the
//! `oracles` module re-derives both from first principles in quadratic
//! time and exists solely to check them (and to power the CLI's
//! `metrics-oracle` self-test). Keep the two halves independent.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Prf1 {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub confusion: Confusion,
    /// Set when a zero denominator forced the metric to 0.
    pub precision_degenerate: bool,
    pub recall_degenerate: bool,
}

/// Threshold metrics: predict positive iff score >= threshold.
pub fn prf1(scores: &[f64], golds: &[bool], threshold: f64) -> Result<Prf1> {
    if scores.len() != golds.len() {
        return Err(Error::Dimension {
            op: "prf1",
            left: format!("{} scores", scores.len()),
            right: format!("{} golds", golds.len()),
        });
    }
    if scores.is_empty() {
        return Err(Error::EmptySequence("prf1"));
    }
    let mut c = Confusion {
        tp: 0,
        fp: 0,
        fn_: 0,
        tn: 0,
    };
    for (&s, &g) in scores.iter().zip(golds) {
        match (s >= threshold, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    let precision_degenerate = c.tp + c.fp == 0;
    let recall_degenerate = c.tp + c.fn_ == 0;
    let precision = if precision_degenerate {
        0.0
    } else {
        c.tp as f64 / (c.tp + c.fp) as f64
    };
    let recall = if recall_degenerate {
        0.0
    } else {
        c.tp as f64 / (c.tp + c.fn_) as f64
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(Prf1 {
        precision,
        recall,
        f1,
        confusion: c,
        precision_degenerate,
        recall_degenerate,
    })
}

fn class_counts(golds: &[bool]) -> (usize, usize) {
    let pos = golds.iter().filter(|&&g| g).count();
    (pos, golds.len() - pos)
}

/// ROC-AUC as the Mann-Whitney statistic (ties credit 0.5), computed from
/// average ranks in O(n log n).
pub fn roc_auc(scores: &[f64], golds: &[bool]) -> Result<f64> {
    let (pos, neg) = class_counts(golds);
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedMetric(
            "roc_auc needs at least one positive and one negative".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j averaged over the tie group.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if golds[idx] {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }
    let u = rank_sum_pos - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos as f64 * neg as f64))
}

/// PR-AUC as average precision: sum over descending distinct-score
/// thresholds of (recall step) x (precision at that threshold).
pub fn pr_auc(scores: &[f64], golds: &[bool]) -> Result<f64> {
    let (pos, _) = class_counts(golds);
    if pos == 0 {
        return Err(Error::UndefinedMetric("pr_auc needs at least one positive".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));
    let mut ap = 0.0;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut prev_recall = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        for &idx in &order[i..j] {
            if golds[idx] {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        let recall = tp as f64 / pos as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    Ok(ap)
}

/// One row per distinct threshold (descending) for curve export.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub fpr: f64,
    pub tpr: f64,
}

pub fn curve_points(scores: &[f64], golds: &[bool]) -> Result<Vec<CurvePoint>> {
    let (pos, neg) = class_counts(golds);
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedMetric(
            "curves need at least one positive and one negative".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));
    let mut points = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        let mut j = i;
        while j < order.len() && scores[order[j]] == threshold {
            j += 1;
        }
        for &idx in &order[i..j] {
            if golds[idx] {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        points.push(CurvePoint {
            threshold,
            precision: tp as f64 / (tp + fp) as f64,
            recall: tp as f64 / pos as f64,
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
        });
        i = j;
    }
    Ok(points)
}

/// Quadratic-time reference implementations, straight from definitions.
pub mod oracles {
    use super::*;

    /// Fraction of (positive, negative) pairs ranked correctly, ties 0.5.
    pub fn roc_auc_pairwise(scores: &[f64], golds: &[bool]) -> Result<f64> {
        let (pos, neg) = class_counts(golds);
        if pos == 0 || neg == 0 {
            return Err(Error::UndefinedMetric("single-class golds".into()));
        }
        let mut credit = 0.0;
        for (i, &gi) in golds.iter().enumerate() {
            if !gi {
                continue;
            }
            for (j, &gj) in golds.iter().enumerate() {
                if gj {
                    continue;
                }
                credit += if scores[i] > scores[j] {
                    1.0
                } else if scores[i] == scores[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
        Ok(credit / (pos * neg) as f64)
    }

    /// Average precision by explicit threshold enumeration: every distinct
    /// score is a threshold; precision and recall are recounted from
    /// scratch at each one.
    pub fn pr_auc_threshold_sweep(scores: &[f64], golds: &[bool]) -> Result<f64> {
        let (pos, _) = class_counts(golds);
        if pos == 0 {
            return Err(Error::UndefinedMetric("no positives".into()));
        }
        let mut thresholds: Vec<f64> = scores.to_vec();
        thresholds.sort_by(|a, b| b.partial_cmp(a).expect("finite scores"));
        thresholds.dedup();
        let mut ap = 0.0;
        let mut prev_recall = 0.0;
        for &t in &thresholds {
            let mut tp = 0usize;
            let mut fp = 0usize;
            for (&s, &g) in scores.iter().zip(golds) {
                if s >= t {
                    if g {
                        tp += 1;
                    } else {
                        fp += 1;
                    }
                }
            }
            let recall = tp as f64 / pos as f64;
            let precision = tp as f64 / (tp + fp) as f64;
            ap += (recall - prev_recall) * precision;
            prev_recall = recall;
        }
        Ok(ap)
    }

    /// Confusion counts by naive loop, for consistency checks.
    pub fn confusion_naive(scores: &[f64], golds: &[bool], threshold: f64) -> Confusion {
        let mut c = Confusion {
            tp: 0,
            fp: 0,
            fn_: 0,
            tn: 0,
        };
        for (&s, &g) in scores.iter().zip(golds) {
            if s >= threshold && g {
                c.tp += 1;
            }
            if s >= threshold && !g {
                c.fp += 1;
            }
            if s < threshold && g {
                c.fn_ += 1;
            }
            if s < threshold && !g {
                c.tn += 1;
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prf1_forced_arithmetic() {
        // TP=3, FP=1, FN=2: P=0.75, R=0.6, F1=2/3.
        let scores = [0.9, 0.9, 0.9, 0.9, 0.1, 0.1];
        let golds = [true, true, true, false, true, true];
        let m = prf1(&scores, &golds, 0.5).unwrap();
        assert_eq!(m.confusion, Confusion { tp: 3, fp: 1, fn_: 2, tn: 0 });
        assert!((m.precision - 0.75).abs() < 1e-15);
        assert!((m.recall - 0.6).abs() < 1e-15);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn prf1_degenerate_cases() {
        let m = prf1(&[0.1, 0.2], &[true, false], 0.5).unwrap();
        assert_eq!(m.precision, 0.0);
        assert!(m.precision_degenerate);
        assert_eq!(m.recall, 0.0);

        let m = prf1(&[0.9, 0.1], &[true, false], 0.5).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));

        assert!(prf1(&[0.5], &[true, false], 0.5).is_err());
    }

    #[test]
    fn f1_consistent_with_p_and_r() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.gen_range(2..50);
            let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let golds: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
            let m = prf1(&scores, &golds, 0.5).unwrap();
            if m.precision + m.recall > 0.0 {
                let expect = 2.0 * m.precision * m.recall / (m.precision + m.recall);
                assert!((m.f1 - expect).abs() < 1e-12);
            }
            let naive = oracles::confusion_naive(&scores, &golds, 0.5);
            assert_eq!(m.confusion, naive);
        }
    }

    #[test]
    fn roc_auc_known_values() {
        // golds [1,0,1,0] by descending score: 3 of 4 pairs concordant.
        let scores = [0.9, 0.8, 0.7, 0.6];
        let golds = [true, false, true, false];
        assert!((roc_auc(&scores, &golds).unwrap() - 0.75).abs() < 1e-15);

        let sep = roc_auc(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(sep, 1.0);

        let tied = roc_auc(&[0.5, 0.5, 0.5], &[true, false, true]).unwrap();
        assert_eq!(tied, 0.5);

        assert!(roc_auc(&[0.5, 0.6], &[true, true]).is_err());
    }

    #[test]
    fn pr_auc_known_values() {
        let perfect = pr_auc(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(perfect, 1.0);

        // 1*(1/2) + (2/3)*(1/2) = 5/6.
        let ap = pr_auc(&[0.9, 0.8, 0.7, 0.6], &[true, false, true, false]).unwrap();
        assert!((ap - 5.0 / 6.0).abs() < 1e-15);

        assert!(pr_auc(&[0.5], &[false]).is_err());
    }

    #[test]
    fn fast_paths_match_oracles_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..200 {
            let n = rng.gen_range(2..=200);
            // Heavy ties: draw from a small discrete grid half the time.
            let gridded = round % 2 == 0;
            let scores: Vec<f64> = (0..n)
                .map(|_| {
                    if gridded {
                        (rng.gen_range(0..5) as f64) / 4.0
                    } else {
                        rng.gen_range(0.0..1.0)
                    }
                })
                .collect();
            let mut golds: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
            if !golds.contains(&true) {
                golds[0] = true;
            }
            if !golds.contains(&false) {
                golds[0] = false;
                if n > 1 {
                    golds[1] = true;
                }
            }
            if !golds.contains(&true) || !golds.contains(&false) {
                continue;
            }
            let fast = roc_auc(&scores, &golds).unwrap();
            let slow = oracles::roc_auc_pairwise(&scores, &golds).unwrap();
            assert!((fast - slow).abs() <= 1e-12, "roc {fast} vs {slow}");

            let fast = pr_auc(&scores, &golds).unwrap();
            let slow = oracles::pr_auc_threshold_sweep(&scores, &golds).unwrap();
            assert!((fast - slow).abs() <= 1e-12, "pr {fast} vs {slow}");
        }
    }

    #[test]
    fn aucs_invariant_under_monotone_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let n = rng.gen_range(4..100);
            let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let mut golds: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.4)).collect();
            golds[0] = true;
            golds[1] = false;
            let cubed: Vec<f64> = scores.iter().map(|s| s * s * s).collect();
            assert_eq!(
                roc_auc(&scores, &golds).unwrap(),
                roc_auc(&cubed, &golds).unwrap()
            );
            assert_eq!(
                pr_auc(&scores, &golds).unwrap(),
                pr_auc(&cubed, &golds).unwrap()
            );
        }
    }

    #[test]
    fn curve_points_descend_thresholds() {
        let scores = [0.9, 0.8, 0.7, 0.6];
        let golds = [true, false, true, false];
        let pts = curve_points(&scores, &golds).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(pts.windows(2).all(|w| w[0].threshold > w[1].threshold));
        assert_eq!(pts.last().unwrap().recall, 1.0);
        assert_eq!(pts.last().unwrap().fpr, 1.0);
    }
}
