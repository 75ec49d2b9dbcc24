//! Full model: embedding lookup, one of the four sentence encoders, and
//! the softmax head, with a fused backward pass writing into a flat
//! gradient buffer.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::cnn::{cnn_backward, cnn_forward, CnnCache};
use crate::model::config::{EncoderKind, ModelConfig};
use crate::model::head::{head_backward, head_forward, HeadCache};
use crate::model::lstm::{lstm_backward, lstm_forward, reverse_rows, LstmCache, LstmWeights};
use crate::model::params::ParameterSet;
use crate::model::tcn::{tcn_backward, tcn_forward, TcnBlockWeights, TcnCache};
use crate::num::gradcheck::DifferentiableOp;
use crate::num::ops::FilterBank;
use crate::num::Matrix;
use crate::text::EmbeddingTable;

#[derive(Debug, Clone)]
pub enum EncoderCache {
    Lstm(LstmCache),
    Bilstm {
        fwd: LstmCache,
        bwd: LstmCache,
        rev_seq: Matrix,
    },
    Cnn {
        cache: CnnCache,
        banks: Vec<FilterBank>,
    },
    Tcn(TcnCache),
}

#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub seq: Matrix,
    pub encoder: EncoderCache,
    pub sentence: Vec<f64>,
    pub head: HeadCache,
}

impl ForwardCache {
    pub fn probs(&self) -> &[f64] {
        &self.head.probs
    }
}

#[derive(Debug, Clone)]
pub struct Network {
    pub params: ParameterSet,
}

impl Network {
    pub fn new(config: &ModelConfig, embeddings: &EmbeddingTable) -> Result<Network> {
        Ok(Network {
            params: ParameterSet::init(config, embeddings)?,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.params.config
    }

    /// Embedding lookup: row t is the vector of ids[t].
    pub fn embed(&self, ids: &[u32]) -> Result<Matrix> {
        if ids.is_empty() {
            return Err(Error::EmptySequence("embed"));
        }
        let d = self.config().embed_dim;
        let table = self.params.group("embedding");
        let vocab = self.params.vocab_size;
        let mut seq = Matrix::zeros(ids.len(), d);
        for (t, &id) in ids.iter().enumerate() {
            let id = id as usize;
            if id >= vocab {
                return Err(Error::Data(format!(
                    "token id {id} out of range (vocabulary size {vocab})"
                )));
            }
            seq.row_mut(t).copy_from_slice(&table[id * d..(id + 1) * d]);
        }
        Ok(seq)
    }

    fn cnn_banks(&self) -> Vec<FilterBank> {
        let cfg = self.config();
        cfg.cnn_filter_widths
            .iter()
            .map(|&w| FilterBank {
                width: w,
                count: cfg.cnn_filters_per_width,
                input_dim: cfg.embed_dim,
                weights: Matrix::from_vec(
                    cfg.cnn_filters_per_width,
                    w * cfg.embed_dim,
                    self.params.group(&format!("cnn.w{w}.filters")).to_vec(),
                )
                .expect("bank shape from layout"),
                bias: self.params.group(&format!("cnn.w{w}.bias")).to_vec(),
            })
            .collect()
    }

    fn lstm_weights<'a>(&'a self, prefix: &str, hidden: usize) -> LstmWeights<'a> {
        LstmWeights {
            w_x: self.params.group(&format!("{prefix}.w_x")),
            w_h: self.params.group(&format!("{prefix}.w_h")),
            b: self.params.group(&format!("{prefix}.b")),
            hidden,
            input_dim: self.config().embed_dim,
        }
    }

    fn tcn_blocks(&self) -> Vec<TcnBlockWeights<'_>> {
        let cfg = self.config();
        cfg.tcn_dilations
            .iter()
            .enumerate()
            .map(|(b, &dilation)| TcnBlockWeights {
                w: self.params.group(&format!("tcn.{b}.w")),
                bias: self.params.group(&format!("tcn.{b}.b")),
                c_in: if b == 0 { cfg.embed_dim } else { cfg.tcn_channels },
                c_out: cfg.tcn_channels,
                kernel: cfg.tcn_kernel,
                dilation,
            })
            .collect()
    }

    fn tcn_proj(&self) -> Option<&[f64]> {
        let cfg = self.config();
        if cfg.embed_dim != cfg.tcn_channels {
            Some(self.params.group("tcn.proj.w"))
        } else {
            None
        }
    }

    /// Forward pass over the real token ids of one sentence. Pass a
    /// dropout rng for training mode; `None` is the deterministic eval
    /// path.
    pub fn forward(
        &self,
        ids: &[u32],
        mut dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Result<ForwardCache> {
        let cfg = self.config();
        let seq = self.embed(ids)?;
        let rate = cfg.dropout_rate;
        let (sentence, encoder) = match cfg.encoder {
            EncoderKind::Lstm => {
                let w = self.lstm_weights("lstm", cfg.lstm_hidden);
                let (h, cache) = lstm_forward(&seq, &w);
                (h, EncoderCache::Lstm(cache))
            }
            EncoderKind::Bilstm => {
                let h = cfg.bilstm_hidden_per_dir;
                let rev_seq = reverse_rows(&seq);
                let (mut fwd_h, fwd) = lstm_forward(&seq, &self.lstm_weights("bilstm.fwd", h));
                let (bwd_h, bwd) = lstm_forward(&rev_seq, &self.lstm_weights("bilstm.bwd", h));
                fwd_h.extend(bwd_h);
                (fwd_h, EncoderCache::Bilstm { fwd, bwd, rev_seq })
            }
            EncoderKind::Cnn => {
                let banks = self.cnn_banks();
                let (pooled, cache) = cnn_forward(&seq, &banks)?;
                (pooled, EncoderCache::Cnn { cache, banks })
            }
            EncoderKind::Tcn => {
                let blocks = self.tcn_blocks();
                let dropout = dropout_rng.as_deref_mut().map(|rng| (rate, rng));
                let (h, cache) = tcn_forward(&seq, &blocks, self.tcn_proj(), dropout);
                (h, EncoderCache::Tcn(cache))
            }
        };
        let head = head_forward(
            &sentence,
            self.params.group("head.w"),
            self.params.group("head.b"),
            cfg.num_classes,
            dropout_rng.map(|rng| (rate, rng)),
        )?;
        Ok(ForwardCache {
            seq,
            encoder,
            sentence,
            head,
        })
    }

    /// Eval-mode class probabilities; a pure function of (ids, params).
    pub fn predict_probs(&self, ids: &[u32]) -> Result<Vec<f64>> {
        Ok(self.forward(ids, None)?.head.probs)
    }

    /// Positive-class probability.
    pub fn score(&self, ids: &[u32]) -> Result<f64> {
        Ok(self.predict_probs(ids)?[1])
    }

    /// Accumulate gradients of a scalar objective into `grads`, given the
    /// gradient on the logits. The buffer must be parameter-shaped.
    pub fn backward(
        &self,
        ids: &[u32],
        cache: &ForwardCache,
        dlogits: &[f64],
        grads: &mut [f64],
    ) -> Result<()> {
        let cfg = self.config();
        let layout = self.params.layout().clone();
        let mut parts = layout.split_mut(grads).into_iter();
        let d_embedding = parts.next().expect("embedding group first");

        // Encoder group slices in layout order.
        let mut enc_parts: Vec<&mut [f64]> = Vec::new();
        for _ in 0..layout.groups().len() - 3 {
            enc_parts.push(parts.next().expect("encoder group"));
        }
        let d_head_w = parts.next().expect("head.w");
        let d_head_b = parts.next().expect("head.b");

        let d_sentence = head_backward(
            &cache.head,
            self.params.group("head.w"),
            cfg.num_classes,
            dlogits,
            d_head_w,
            d_head_b,
        );

        let dseq = match (&cache.encoder, cfg.encoder) {
            (EncoderCache::Lstm(lstm_cache), EncoderKind::Lstm) => {
                let w = self.lstm_weights("lstm", cfg.lstm_hidden);
                let mut it = enc_parts.into_iter();
                let (dw_x, dw_h, db) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
                lstm_backward(&cache.seq, &w, lstm_cache, &d_sentence, dw_x, dw_h, db)
            }
            (EncoderCache::Bilstm { fwd, bwd, rev_seq }, EncoderKind::Bilstm) => {
                let h = cfg.bilstm_hidden_per_dir;
                let mut it = enc_parts.into_iter();
                let (dfx, dfh, dfb) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
                let (dbx, dbh, dbb) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
                let mut dseq = lstm_backward(
                    &cache.seq,
                    &self.lstm_weights("bilstm.fwd", h),
                    fwd,
                    &d_sentence[..h],
                    dfx,
                    dfh,
                    dfb,
                );
                let dseq_rev = lstm_backward(
                    rev_seq,
                    &self.lstm_weights("bilstm.bwd", h),
                    bwd,
                    &d_sentence[h..],
                    dbx,
                    dbh,
                    dbb,
                );
                let t_len = dseq.rows();
                for t in 0..t_len {
                    let rev = dseq_rev.row(t_len - 1 - t).to_vec();
                    for (o, v) in dseq.row_mut(t).iter_mut().zip(rev) {
                        *o += v;
                    }
                }
                dseq
            }
            (EncoderCache::Cnn { cache: cnn_cache, banks }, EncoderKind::Cnn) => {
                let mut bank_grads = Vec::new();
                let mut it = enc_parts.into_iter();
                for _ in banks {
                    bank_grads.push((it.next().unwrap(), it.next().unwrap()));
                }
                cnn_backward(cnn_cache, banks, &d_sentence, bank_grads)
            }
            (EncoderCache::Tcn(tcn_cache), EncoderKind::Tcn) => {
                let blocks = self.tcn_blocks();
                let mut it = enc_parts.into_iter();
                let mut block_grads = Vec::new();
                for _ in &blocks {
                    block_grads.push((it.next().unwrap(), it.next().unwrap()));
                }
                let dproj = it.next();
                tcn_backward(
                    &blocks,
                    tcn_cache,
                    &d_sentence,
                    block_grads,
                    dproj,
                    self.tcn_proj(),
                )
            }
            _ => return Err(Error::Usage("cache does not match the configured encoder".into())),
        };

        // Embedding rows accumulate across repeated ids. PAD freezing and
        // the freeze_embeddings flag are applied by the trainer, which
        // zeroes the relevant gradient rows before the update.
        let d = cfg.embed_dim;
        for (t, &id) in ids.iter().enumerate() {
            let row = &mut d_embedding[id as usize * d..(id as usize + 1) * d];
            for (o, &g) in row.iter_mut().zip(dseq.row(t)) {
                *o += g;
            }
        }
        Ok(())
    }
}

/// The full model loss as a checkable op over the flat parameter vector,
/// for finite-difference verification of every layer at once. Dropout is
/// bypassed (eval forward), matching the deterministic-forward
/// requirement. The loss sums over several sentences with mixed gold
/// classes so that no parameter's total gradient sits near zero, where a
/// relative comparison against central differences is all noise.
pub struct ModelLossOp {
    pub config: ModelConfig,
    pub vocab_size: usize,
    /// (token ids, gold class) per summed sentence.
    pub cases: Vec<(Vec<u32>, usize)>,
}

impl ModelLossOp {
    pub fn single(config: ModelConfig, vocab_size: usize, ids: Vec<u32>, gold: usize) -> Self {
        ModelLossOp {
            config,
            vocab_size,
            cases: vec![(ids, gold)],
        }
    }

    fn network(&self, flat: &[f64]) -> Result<Network> {
        Ok(Network {
            params: ParameterSet::from_flat(&self.config, self.vocab_size, flat.to_vec())?,
        })
    }
}

impl DifferentiableOp for ModelLossOp {
    fn forward(&self, inputs: &[Matrix]) -> Result<Matrix> {
        let net = self.network(inputs[0].as_slice())?;
        let mut loss = 0.0;
        for (ids, gold) in &self.cases {
            let probs = net.predict_probs(ids)?;
            loss += -probs[*gold].max(1e-300).ln();
        }
        Matrix::from_vec(1, 1, vec![loss])
    }

    fn backward(&self, inputs: &[Matrix], out_grad: &Matrix) -> Result<Vec<Matrix>> {
        let net = self.network(inputs[0].as_slice())?;
        let g = out_grad.as_slice()[0];
        let mut grads = vec![0.0; inputs[0].len()];
        for (ids, gold) in &self.cases {
            let cache = net.forward(ids, None)?;
            let mut dlogits: Vec<f64> = cache.head.probs.iter().map(|&p| g * p).collect();
            dlogits[*gold] -= g;
            net.backward(ids, &cache, &dlogits, &mut grads)?;
        }
        Ok(vec![Matrix::from_vec(1, grads.len(), grads)?])
    }
}

/// A seeded full-model check instance: tiny dimensions, random weights
/// drawn wider than the training init, and several summed sentences with
/// both gold classes. Both choices keep every parameter's gradient well
/// above the central-difference noise floor, where a relative comparison
/// stops being meaningful.
pub fn full_model_check_case(kind: EncoderKind, seed: u64) -> Result<(ModelLossOp, Matrix)> {
    use rand::{Rng, SeedableRng};
    let config = ModelConfig::tiny(kind, seed);
    let words: Vec<String> = ["a", "b", "c", "d", "e"].iter().map(|s| s.to_string()).collect();
    let vocab = crate::text::Vocabulary::build([words.iter()])?;
    let table = crate::text::embeddings::build_table(&[], &vocab, config.embed_dim, seed ^ 0x77)?;
    let params = ParameterSet::init(&config, &table)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(5));
    let data: Vec<f64> = (0..params.data().len())
        .map(|_| rng.gen_range(-0.9..0.9))
        .collect();
    let flat = Matrix::from_vec(1, data.len(), data)?;
    let mut cases = vec![
        (vec![2, 3, 4], 0),
        (vec![2, 2, 5, 6, 3, 4, 2], 1), // repeated ids accumulate
        (vec![6], 0),
        (vec![5, 4, 3, 2, 6], 1),
    ];
    cases.rotate_left((seed % 4) as usize);
    Ok((
        ModelLossOp {
            config,
            vocab_size: vocab.size(),
            cases,
        },
        flat,
    ))
}
