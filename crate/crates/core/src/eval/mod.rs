//! Evaluation protocol: k-fold plans, binary-classification metrics with
//! quadratic-time oracles, and fold aggregation.

pub mod folds;
pub mod metrics;
pub mod report;

pub use folds::{dev_split, kfold_split, kfold_split_notes, tri_split, FoldPlan, SplitGranularity};
pub use metrics::{curve_points, pr_auc, prf1, roc_auc, Confusion, CurvePoint, Prf1};
pub use report::{aggregate_folds, mean_std, FoldReport, MeanStd, RunReport, ScoredSentence};
