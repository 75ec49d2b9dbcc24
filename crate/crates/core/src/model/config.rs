//! Model configuration shared by all four encoders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncoderKind {
    Lstm,
    Bilstm,
    Cnn,
    Tcn,
}

impl std::fmt::Display for EncoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EncoderKind::Lstm => "lstm",
            EncoderKind::Bilstm => "bilstm",
            EncoderKind::Cnn => "cnn",
            EncoderKind::Tcn => "tcn",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for EncoderKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lstm" => Ok(EncoderKind::Lstm),
            "bilstm" => Ok(EncoderKind::Bilstm),
            "cnn" => Ok(EncoderKind::Cnn),
            "tcn" => Ok(EncoderKind::Tcn),
            other => Err(Error::Usage(format!("unknown encoder kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub encoder: EncoderKind,
    pub embed_dim: usize,
    pub sentence_dim: usize,
    pub dropout_rate: f64,
    pub cnn_filter_widths: Vec<usize>,
    pub cnn_filters_per_width: usize,
    pub lstm_hidden: usize,
    pub bilstm_hidden_per_dir: usize,
    pub tcn_channels: usize,
    pub tcn_kernel: usize,
    pub tcn_dilations: Vec<usize>,
    pub num_classes: usize,
    /// When set, the embedding table receives no gradient updates.
    pub freeze_embeddings: bool,
    pub seed: u64,
}

impl ModelConfig {
    pub fn new(encoder: EncoderKind, seed: u64) -> Self {
        ModelConfig {
            encoder,
            embed_dim: 100,
            sentence_dim: 300,
            dropout_rate: 0.5,
            cnn_filter_widths: vec![3, 4, 5],
            cnn_filters_per_width: 100,
            lstm_hidden: 300,
            bilstm_hidden_per_dir: 150,
            tcn_channels: 300,
            tcn_kernel: 3,
            tcn_dilations: vec![1, 2, 4],
            num_classes: 2,
            freeze_embeddings: false,
            seed,
        }
    }

    /// Downsized configuration for tests and gradient checks; keeps every
    /// structural invariant while shrinking each dimension.
    pub fn tiny(encoder: EncoderKind, seed: u64) -> Self {
        ModelConfig {
            encoder,
            embed_dim: 4,
            sentence_dim: 6,
            dropout_rate: 0.5,
            cnn_filter_widths: vec![2, 3],
            cnn_filters_per_width: 3,
            lstm_hidden: 6,
            bilstm_hidden_per_dir: 3,
            tcn_channels: 6,
            tcn_kernel: 2,
            tcn_dilations: vec![1, 2],
            num_classes: 2,
            freeze_embeddings: false,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Usage(msg));
        if self.embed_dim == 0 || self.sentence_dim == 0 || self.num_classes < 2 {
            return fail("embed_dim, sentence_dim and num_classes must be positive".into());
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return fail(format!("dropout_rate {} outside [0, 1)", self.dropout_rate));
        }
        match self.encoder {
            EncoderKind::Cnn => {
                if self.cnn_filter_widths.is_empty() || self.cnn_filter_widths.contains(&0) {
                    return fail("cnn filter widths must be non-empty and positive".into());
                }
                if self.cnn_filter_widths.len() * self.cnn_filters_per_width != self.sentence_dim {
                    return fail(format!(
                        "cnn widths ({}) x filters per width ({}) must equal sentence_dim ({})",
                        self.cnn_filter_widths.len(),
                        self.cnn_filters_per_width,
                        self.sentence_dim
                    ));
                }
            }
            EncoderKind::Lstm => {
                if self.lstm_hidden != self.sentence_dim {
                    return fail(format!(
                        "lstm hidden ({}) must equal sentence_dim ({})",
                        self.lstm_hidden, self.sentence_dim
                    ));
                }
            }
            EncoderKind::Bilstm => {
                if 2 * self.bilstm_hidden_per_dir != self.sentence_dim {
                    return fail(format!(
                        "2 x bilstm hidden per direction ({}) must equal sentence_dim ({})",
                        self.bilstm_hidden_per_dir, self.sentence_dim
                    ));
                }
            }
            EncoderKind::Tcn => {
                if self.tcn_channels != self.sentence_dim {
                    return fail(format!(
                        "tcn channels ({}) must equal sentence_dim ({})",
                        self.tcn_channels, self.sentence_dim
                    ));
                }
                if self.tcn_kernel < 1 || self.tcn_dilations.is_empty() {
                    return fail("tcn needs kernel >= 1 and at least one dilation".into());
                }
            }
        }
        Ok(())
    }

    pub fn max_cnn_width(&self) -> usize {
        self.cnn_filter_widths.iter().copied().max().unwrap_or(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_for_every_encoder() {
        for kind in [
            EncoderKind::Lstm,
            EncoderKind::Bilstm,
            EncoderKind::Cnn,
            EncoderKind::Tcn,
        ] {
            ModelConfig::new(kind, 1).validate().unwrap();
            ModelConfig::tiny(kind, 1).validate().unwrap();
        }
    }

    #[test]
    fn cnn_dimension_invariant_enforced() {
        let mut cfg = ModelConfig::new(EncoderKind::Cnn, 1);
        cfg.cnn_filters_per_width = 99;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn bilstm_split_invariant_enforced() {
        let mut cfg = ModelConfig::new(EncoderKind::Bilstm, 1);
        cfg.bilstm_hidden_per_dir = 100;
        assert!(cfg.validate().is_err());
    }
}
