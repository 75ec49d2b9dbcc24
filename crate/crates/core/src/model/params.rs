//! Trainable parameters in one flat buffer with a named-group layout.
//!
//! Storing everything contiguously keeps the optimizer, gradient buffers,
//! checkpoints and finite-difference checks uniform: a gradient is just a
//! `Vec<f64>` of the same length, and "the parameter group at offset i" is
//! always answerable for diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::config::{EncoderKind, ModelConfig};
use crate::text::EmbeddingTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl GroupSpec {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    groups: Vec<GroupSpec>,
    total: usize,
}

impl Layout {
    /// Group layout for a config and vocabulary size. Deterministic order:
    /// embedding, encoder groups, output head. LSTM gate blocks are fused
    /// rows in i, f, g, o order.
    pub fn of(config: &ModelConfig, vocab_size: usize) -> Layout {
        let d = config.embed_dim;
        let mut groups: Vec<(String, usize, usize)> = Vec::new();
        groups.push(("embedding".into(), vocab_size, d));
        match config.encoder {
            EncoderKind::Lstm => {
                let h = config.lstm_hidden;
                groups.push(("lstm.w_x".into(), 4 * h, d));
                groups.push(("lstm.w_h".into(), 4 * h, h));
                groups.push(("lstm.b".into(), 1, 4 * h));
            }
            EncoderKind::Bilstm => {
                let h = config.bilstm_hidden_per_dir;
                for dir in ["fwd", "bwd"] {
                    groups.push((format!("bilstm.{dir}.w_x"), 4 * h, d));
                    groups.push((format!("bilstm.{dir}.w_h"), 4 * h, h));
                    groups.push((format!("bilstm.{dir}.b"), 1, 4 * h));
                }
            }
            EncoderKind::Cnn => {
                for &w in &config.cnn_filter_widths {
                    groups.push((format!("cnn.w{w}.filters"), config.cnn_filters_per_width, w * d));
                    groups.push((format!("cnn.w{w}.bias"), 1, config.cnn_filters_per_width));
                }
            }
            EncoderKind::Tcn => {
                let c = config.tcn_channels;
                for (b, _) in config.tcn_dilations.iter().enumerate() {
                    let c_in = if b == 0 { d } else { c };
                    groups.push((format!("tcn.{b}.w"), config.tcn_kernel * c_in, c));
                    groups.push((format!("tcn.{b}.b"), 1, c));
                }
                if d != c {
                    groups.push(("tcn.proj.w".into(), d, c));
                }
            }
        }
        groups.push(("head.w".into(), config.num_classes, config.sentence_dim));
        groups.push(("head.b".into(), 1, config.num_classes));

        let mut specs = Vec::with_capacity(groups.len());
        let mut offset = 0;
        for (name, rows, cols) in groups {
            specs.push(GroupSpec {
                name,
                rows,
                cols,
                offset,
            });
            offset += rows * cols;
        }
        Layout {
            groups: specs,
            total: offset,
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn groups(&self) -> &[GroupSpec] {
        &self.groups
    }

    pub fn spec(&self, name: &str) -> Option<&GroupSpec> {
        self.groups.iter().find(|g| g.name == name)
    }

    pub fn group_of_offset(&self, offset: usize) -> Option<&GroupSpec> {
        self.groups
            .iter()
            .find(|g| offset >= g.offset && offset < g.offset + g.len())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.groups.iter().position(|g| g.name == name)
    }

    /// Split a parameter-shaped buffer into one mutable slice per group,
    /// in group order. Groups are contiguous by construction.
    pub fn split_mut<'a>(&self, data: &'a mut [f64]) -> Vec<&'a mut [f64]> {
        assert_eq!(data.len(), self.total);
        let mut out = Vec::with_capacity(self.groups.len());
        let mut rest = data;
        for g in &self.groups {
            let (head, tail) = rest.split_at_mut(g.len());
            out.push(head);
            rest = tail;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ParameterSet {
    pub config: ModelConfig,
    pub vocab_size: usize,
    layout: Layout,
    data: Vec<f64>,
}

impl ParameterSet {
    /// Initialize: embedding rows copied from the (pretrained) table,
    /// weight matrices Xavier-uniform under the config seed, biases zero.
    pub fn init(config: &ModelConfig, embeddings: &EmbeddingTable) -> Result<ParameterSet> {
        config.validate()?;
        if embeddings.dim() != config.embed_dim {
            return Err(Error::Dimension {
                op: "ParameterSet::init",
                left: format!("embedding dim {}", embeddings.dim()),
                right: format!("config embed_dim {}", config.embed_dim),
            });
        }
        let vocab_size = embeddings.vocab_size();
        let layout = Layout::of(config, vocab_size);
        let mut data = vec![0.0; layout.total()];
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for spec in layout.groups() {
            let slice = &mut data[spec.offset..spec.offset + spec.len()];
            if spec.name == "embedding" {
                slice.copy_from_slice(embeddings.matrix().as_slice());
            } else if spec.name.ends_with(".b") || spec.name.ends_with(".bias") {
                // biases stay zero
            } else {
                let bound = (6.0 / (spec.rows + spec.cols) as f64).sqrt();
                for v in slice.iter_mut() {
                    *v = rng.gen_range(-bound..bound);
                }
            }
        }
        Ok(ParameterSet {
            config: config.clone(),
            vocab_size,
            layout,
            data,
        })
    }

    /// Wrap an existing flat buffer (checkpoint loading, gradient checks).
    pub fn from_flat(config: &ModelConfig, vocab_size: usize, data: Vec<f64>) -> Result<ParameterSet> {
        config.validate()?;
        let layout = Layout::of(config, vocab_size);
        if data.len() != layout.total() {
            return Err(Error::Integrity(format!(
                "parameter buffer has {} values, layout expects {}",
                data.len(),
                layout.total()
            )));
        }
        Ok(ParameterSet {
            config: config.clone(),
            vocab_size,
            layout,
            data,
        })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn group(&self, name: &str) -> &[f64] {
        let spec = self
            .layout
            .spec(name)
            .unwrap_or_else(|| panic!("unknown parameter group {name}"));
        &self.data[spec.offset..spec.offset + spec.len()]
    }

    pub fn group_mut(&mut self, name: &str) -> &mut [f64] {
        let spec = self
            .layout
            .spec(name)
            .unwrap_or_else(|| panic!("unknown parameter group {name}"))
            .clone();
        &mut self.data[spec.offset..spec.offset + spec.len()]
    }

    pub fn zero_grads(&self) -> Vec<f64> {
        vec![0.0; self.data.len()]
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}
