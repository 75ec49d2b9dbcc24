//! Model checkpoint file: a versioned JSON container with the config, the
//! vocabulary, and every parameter matrix under a shape header. JSON f64
//! serialization uses the shortest round-tripping representation, so a
//! write -> read cycle is bit-exact.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::config::ModelConfig;
use crate::model::network::Network;
use crate::model::params::{Layout, ParameterSet};
use crate::text::Vocabulary;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct CheckpointGroup {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub config: ModelConfig,
    pub vocab: Vec<String>,
    pub normalize_glucose: bool,
    pub groups: Vec<CheckpointGroup>,
}

/// A network plus everything needed to score raw text with it.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub network: Network,
    pub vocab: Vocabulary,
    pub normalize_glucose: bool,
}

pub fn save_checkpoint(path: &Path, model: &TrainedModel) -> Result<()> {
    let params = &model.network.params;
    let groups = params
        .layout()
        .groups()
        .iter()
        .map(|g| CheckpointGroup {
            name: g.name.clone(),
            rows: g.rows,
            cols: g.cols,
            data: params.data()[g.offset..g.offset + g.len()].to_vec(),
        })
        .collect();
    let checkpoint = Checkpoint {
        format_version: CHECKPOINT_VERSION,
        config: params.config.clone(),
        vocab: model.vocab.tokens().to_vec(),
        normalize_glucose: model.normalize_glucose,
        groups,
    };
    let json = serde_json::to_string(&checkpoint).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<TrainedModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read checkpoint {}: {e}", path.display())))?;
    let checkpoint: Checkpoint =
        serde_json::from_str(&text).map_err(|e| Error::Integrity(format!("corrupt checkpoint: {e}")))?;
    if checkpoint.format_version != CHECKPOINT_VERSION {
        return Err(Error::Integrity(format!(
            "unsupported checkpoint version {}",
            checkpoint.format_version
        )));
    }
    let vocab = Vocabulary::from_tokens(checkpoint.vocab)?;
    let layout = Layout::of(&checkpoint.config, vocab.size());
    let mut data = vec![0.0; layout.total()];
    if checkpoint.groups.len() != layout.groups().len() {
        return Err(Error::Integrity(format!(
            "checkpoint has {} parameter groups, config implies {}",
            checkpoint.groups.len(),
            layout.groups().len()
        )));
    }
    for (stored, expected) in checkpoint.groups.iter().zip(layout.groups()) {
        if stored.name != expected.name
            || stored.rows != expected.rows
            || stored.cols != expected.cols
            || stored.data.len() != expected.len()
        {
            return Err(Error::Integrity(format!(
                "checkpoint group {:?} does not match the configured shape {}x{} for {:?}",
                stored.name, expected.rows, expected.cols, expected.name
            )));
        }
        if stored.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integrity(format!(
                "checkpoint group {:?} contains non-finite values",
                stored.name
            )));
        }
        data[expected.offset..expected.offset + expected.len()].copy_from_slice(&stored.data);
    }
    let params = ParameterSet::from_flat(&checkpoint.config, vocab.size(), data)?;
    Ok(TrainedModel {
        network: Network { params },
        vocab,
        normalize_glucose: checkpoint.normalize_glucose,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::config::{EncoderKind, ModelConfig};
    use crate::text::embeddings::build_table;

    fn tiny_model() -> TrainedModel {
        let sent: Vec<String> = ["bs", "low", "stable", "juice"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let vocab = Vocabulary::build([sent.iter()]).unwrap();
        let cfg = ModelConfig::tiny(EncoderKind::Cnn, 11);
        let table = build_table(&[], &vocab, cfg.embed_dim, 5).unwrap();
        TrainedModel {
            network: Network::new(&cfg, &table).unwrap(),
            vocab,
            normalize_glucose: true,
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let model = tiny_model();
        save_checkpoint(&path, &model).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(loaded.network.params.data(), model.network.params.data());
        assert_eq!(loaded.vocab.tokens(), model.vocab.tokens());
        assert!(loaded.normalize_glucose);

        // Second save reproduces the file byte for byte.
        let path2 = dir.path().join("model2.json");
        save_checkpoint(&path2, &loaded).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn corrupt_file_is_an_integrity_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        std::fs::write(&path, b"{ not json").unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(Error::Integrity(_))
        ));
    }

    #[test]
    fn shape_mismatch_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let model = tiny_model();
        save_checkpoint(&path, &model).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        text = text.replace("\"rows\":3", "\"rows\":4");
        std::fs::write(&path, text).unwrap();
        assert!(load_checkpoint(&path).is_err());
    }
}
