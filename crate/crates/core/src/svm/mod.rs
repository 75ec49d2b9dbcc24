//! Bag-of-words SVM baseline: RBF kernel, simplified SMO.

pub mod smo;
pub mod sparse;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use smo::{
    predict_decision, predict_label, rbf_kernel, train_svm, SvmConfig, SvmModel,
};
pub use sparse::SparseVec;

/// On-disk model: the trained model plus the feature-space provenance a
/// consumer needs to reproduce its vectors.
#[derive(Debug, Serialize, Deserialize)]
pub struct SvmModelFile {
    pub format_version: u32,
    pub config: SvmConfig,
    pub bigrams: bool,
    pub stopwords_version: String,
    pub model: SvmModel,
}

pub fn save_svm_model(path: &Path, file: &SvmModelFile) -> Result<()> {
    let json = serde_json::to_string(file).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_svm_model(path: &Path) -> Result<SvmModelFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read svm model {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Integrity(format!("corrupt svm model: {e}")))
}
