//! Per-fold and aggregated run reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::folds::SplitGranularity;
use crate::eval::metrics::{curve_points, pr_auc, prf1, roc_auc};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoredSentence {
    pub score: f64,
    pub gold: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub pr_auc: f64,
    pub roc_auc: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    /// Per-sentence scores, kept for curve export and re-aggregation.
    pub scores: Vec<ScoredSentence>,
}

impl FoldReport {
    /// Metrics for one evaluated fold at decision threshold 0.5.
    pub fn from_scores(fold: usize, scores: Vec<ScoredSentence>) -> Result<FoldReport> {
        let s: Vec<f64> = scores.iter().map(|x| x.score).collect();
        let g: Vec<bool> = scores.iter().map(|x| x.gold).collect();
        let m = prf1(&s, &g, 0.5)?;
        Ok(FoldReport {
            fold,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            pr_auc: pr_auc(&s, &g)?,
            roc_auc: roc_auc(&s, &g)?,
            tp: m.confusion.tp,
            fp: m.confusion.fp,
            fn_: m.confusion.fn_,
            tn: m.confusion.tn,
            scores,
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

/// Mean and sample standard deviation (n - 1 denominator).
pub fn mean_std(values: &[f64]) -> MeanStd {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() < 2 {
        0.0
    } else {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    };
    MeanStd {
        mean,
        std: var.sqrt(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub model: String,
    pub granularity: SplitGranularity,
    pub seed: u64,
    pub folds: Vec<FoldReport>,
    pub precision: MeanStd,
    pub recall: MeanStd,
    pub f1: MeanStd,
    /// AUCs over the concatenated fold scores (per-fold values live in the
    /// fold reports).
    pub pooled_pr_auc: f64,
    pub pooled_roc_auc: f64,
    /// Resolved settings, recorded for transparency and reproduction.
    pub settings: std::collections::BTreeMap<String, String>,
}

/// Aggregate at least two fold reports into a run report.
pub fn aggregate_folds(
    model: &str,
    granularity: SplitGranularity,
    seed: u64,
    folds: Vec<FoldReport>,
    settings: std::collections::BTreeMap<String, String>,
) -> Result<RunReport> {
    if folds.len() < 2 {
        return Err(Error::Data(format!(
            "aggregation needs at least 2 folds, got {}",
            folds.len()
        )));
    }
    let pooled: Vec<ScoredSentence> = folds.iter().flat_map(|f| f.scores.iter().cloned()).collect();
    let s: Vec<f64> = pooled.iter().map(|x| x.score).collect();
    let g: Vec<bool> = pooled.iter().map(|x| x.gold).collect();
    let precision = mean_std(&folds.iter().map(|f| f.precision).collect::<Vec<_>>());
    let recall = mean_std(&folds.iter().map(|f| f.recall).collect::<Vec<_>>());
    let f1 = mean_std(&folds.iter().map(|f| f.f1).collect::<Vec<_>>());
    Ok(RunReport {
        model: model.to_string(),
        granularity,
        seed,
        precision,
        recall,
        f1,
        pooled_pr_auc: pr_auc(&s, &g)?,
        pooled_roc_auc: roc_auc(&s, &g)?,
        folds,
        settings,
    })
}

/// Pooled curve rows as CSV: threshold, precision, recall, fpr, tpr.
pub fn write_curves_csv<W: std::io::Write>(mut w: W, report: &RunReport) -> Result<()> {
    let pooled: Vec<ScoredSentence> = report
        .folds
        .iter()
        .flat_map(|f| f.scores.iter().cloned())
        .collect();
    let s: Vec<f64> = pooled.iter().map(|x| x.score).collect();
    let g: Vec<bool> = pooled.iter().map(|x| x.gold).collect();
    writeln!(w, "threshold,precision,recall,fpr,tpr")?;
    for p in curve_points(&s, &g)? {
        writeln!(
            w,
            "{},{},{},{},{}",
            p.threshold, p.precision, p.recall, p.fpr, p.tpr
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fold(fold: usize, scores: &[(f64, bool)]) -> FoldReport {
        let scored = scores
            .iter()
            .map(|&(score, gold)| ScoredSentence { score, gold })
            .collect();
        FoldReport::from_scores(fold, scored).unwrap()
    }

    #[test]
    fn identical_folds_have_zero_std() {
        let a = fold(0, &[(0.9, true), (0.1, false)]);
        let b = fold(1, &[(0.9, true), (0.1, false)]);
        let run = aggregate_folds(
            "cnn",
            SplitGranularity::Sentence,
            1,
            vec![a, b],
            Default::default(),
        )
        .unwrap();
        assert_eq!(run.f1.std, 0.0);
        assert_eq!(run.pooled_roc_auc, 1.0);
    }

    #[test]
    fn forced_mean_std() {
        let ms = mean_std(&[0.9, 1.0]);
        assert!((ms.mean - 0.95).abs() < 1e-15);
        assert!((ms.std - 0.05_f64 * 2.0_f64.sqrt()).abs() < 1e-12);
        assert!((ms.std - 0.0707).abs() < 1e-4);
    }

    #[test]
    fn run_report_recomputable_from_folds() {
        let folds = vec![
            fold(0, &[(0.9, true), (0.2, false), (0.6, true)]),
            fold(1, &[(0.8, true), (0.7, false), (0.1, false)]),
        ];
        let run = aggregate_folds(
            "lstm",
            SplitGranularity::Sentence,
            2,
            folds.clone(),
            Default::default(),
        )
        .unwrap();
        let again = aggregate_folds(
            "lstm",
            SplitGranularity::Sentence,
            2,
            folds,
            Default::default(),
        )
        .unwrap();
        assert_eq!(
            serde_json::to_string(&run).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn single_fold_rejected() {
        let f = fold(0, &[(0.9, true), (0.1, false)]);
        assert!(aggregate_folds(
            "cnn",
            SplitGranularity::Sentence,
            1,
            vec![f],
            Default::default()
        )
        .is_err());
    }

    #[test]
    fn fold_metrics_in_unit_interval_and_consistent() {
        let f = fold(0, &[(0.9, true), (0.6, false), (0.4, true), (0.1, false)]);
        for v in [f.precision, f.recall, f.f1, f.pr_auc, f.roc_auc] {
            assert!((0.0..=1.0).contains(&v));
        }
        if f.precision + f.recall > 0.0 {
            let expect = 2.0 * f.precision * f.recall / (f.precision + f.recall);
            assert!((f.f1 - expect).abs() < 1e-12);
        }
    }
}
