//! Mini-batch training loop with dev-set model selection and early
//! stopping.
//!
//! Determinism: every random choice (shuffling, dropout masks) derives
//! from the training seed, and per-sentence dropout streams are keyed by
//! (seed, epoch, dataset index), so gradients do not depend on which
//! worker thread computes them. Microbatch gradients are merged in index
//! order, which keeps results identical for any thread count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::metrics::prf1;
use crate::model::{ModelConfig, Network};
use crate::text::{EmbeddingTable, PAD_ID};
use crate::train::adam::{adam_step, AdamConfig, AdamState};
use crate::train::loss::cross_entropy;

/// Fixed gradient-merge granularity; independent of the thread count so
/// that float summation order never changes.
const MICROBATCH: usize = 8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without dev-F1 improvement before stopping.
    pub patience: usize,
    pub seed: u64,
    /// Optional loss weight for positive examples; off by default.
    pub positive_weight: Option<f64>,
    /// Worker threads for gradient computation. Results are identical for
    /// any value.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 5e-5,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            batch_size: 32,
            max_epochs: 30,
            patience: 5,
            seed: 0,
            positive_weight: None,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 || self.adam_eps <= 0.0 {
            return Err(Error::Usage("learning rate and epsilon must be > 0".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Usage("batch_size must be >= 1".into()));
        }
        if self.patience > self.max_epochs {
            return Err(Error::Usage(format!(
                "patience {} exceeds max_epochs {}",
                self.patience, self.max_epochs
            )));
        }
        Ok(())
    }

    fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
            epsilon: self.adam_eps,
        }
    }
}

/// An integer-encoded sentence ready for the network.
#[derive(Debug, Clone)]
pub struct EncodedSentence {
    pub ids: Vec<u32>,
    pub label: bool,
}

/// Sentences padded to a common length with PAD ids, real lengths kept
/// alongside. Encoders only ever read the real prefix.
#[derive(Debug, Clone)]
pub struct Batch {
    pub ids: Vec<Vec<u32>>,
    pub real_lens: Vec<usize>,
    pub labels: Vec<bool>,
    /// Position of each sentence in the training set (seeds its dropout).
    pub dataset_indices: Vec<usize>,
}

pub fn make_batch(data: &[EncodedSentence], indices: &[usize]) -> Batch {
    let max_len = indices.iter().map(|&i| data[i].ids.len()).max().unwrap_or(0);
    let mut batch = Batch {
        ids: Vec::with_capacity(indices.len()),
        real_lens: Vec::with_capacity(indices.len()),
        labels: Vec::with_capacity(indices.len()),
        dataset_indices: indices.to_vec(),
    };
    for &i in indices {
        let mut padded = data[i].ids.clone();
        padded.resize(max_len, PAD_ID);
        batch.ids.push(padded);
        batch.real_lens.push(data[i].ids.len());
        batch.labels.push(data[i].label);
    }
    batch
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub dev_precision: f64,
    pub dev_recall: f64,
    pub dev_f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMetric {
    DevF1,
    /// Fallback when the dev set has no positive sentences.
    DevLoss,
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub network: Network,
    pub log: Vec<EpochLog>,
    pub best_epoch: Option<usize>,
    pub selection: SelectionMetric,
    /// Times the loss clamp fired (gold probability underflowed).
    pub clamp_events: u64,
    pub stopped_early: bool,
}

fn mix_seed(a: u64, b: u64, c: u64) -> u64 {
    // splitmix64 over the packed inputs.
    let mut z = a
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(b.wrapping_mul(0xbf58_476d_1ce4_e5b9))
        .wrapping_add(c.wrapping_mul(0x94d0_49bb_1331_11eb));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct MicrobatchResult {
    grads: Vec<f64>,
    loss_sum: f64,
    clamps: u64,
}

/// Gradient of the mean batch loss for one microbatch of sentences.
fn microbatch_grads(
    network: &Network,
    batch: &Batch,
    range: std::ops::Range<usize>,
    batch_len: usize,
    epoch: usize,
    config: &TrainConfig,
) -> Result<MicrobatchResult> {
    let mut grads = network.params.zero_grads();
    let mut loss_sum = 0.0;
    let mut clamps = 0;
    for s in range {
        let real = &batch.ids[s][..batch.real_lens[s]];
        let dataset_index = batch.dataset_indices[s];
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, epoch as u64, dataset_index as u64));
        let cache = network.forward(real, Some(&mut rng))?;
        let gold = usize::from(batch.labels[s]);
        let out = cross_entropy(cache.probs(), gold);
        if out.clamped {
            clamps += 1;
        }
        loss_sum += out.loss;
        let weight = match (config.positive_weight, batch.labels[s]) {
            (Some(w), true) => w,
            _ => 1.0,
        };
        let scale = weight / batch_len as f64;
        let dlogits: Vec<f64> = out.dlogits.iter().map(|g| g * scale).collect();
        network.backward(real, &cache, &dlogits, &mut grads)?;
    }
    Ok(MicrobatchResult {
        grads,
        loss_sum,
        clamps,
    })
}

/// Sum microbatch gradients in index order; workers may compute them in
/// any order.
fn batch_grads(
    network: &Network,
    batch: &Batch,
    epoch: usize,
    config: &TrainConfig,
) -> Result<MicrobatchResult> {
    let batch_len = batch.ids.len();
    let ranges: Vec<std::ops::Range<usize>> = (0..batch_len)
        .step_by(MICROBATCH)
        .map(|start| start..(start + MICROBATCH).min(batch_len))
        .collect();

    let results: Vec<MicrobatchResult> = if config.threads <= 1 || ranges.len() == 1 {
        ranges
            .into_iter()
            .map(|r| microbatch_grads(network, batch, r, batch_len, epoch, config))
            .collect::<Result<_>>()?
    } else {
        let slots: Mutex<Vec<Option<Result<MicrobatchResult>>>> =
            Mutex::new((0..ranges.len()).map(|_| None).collect());
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..config.threads.min(ranges.len()) {
                scope.spawn(|| loop {
                    let job = next.fetch_add(1, Ordering::SeqCst);
                    if job >= ranges.len() {
                        break;
                    }
                    let result = microbatch_grads(
                        network,
                        batch,
                        ranges[job].clone(),
                        batch_len,
                        epoch,
                        config,
                    );
                    slots.lock().expect("slot lock").as_mut_slice()[job] = Some(result);
                });
            }
        });
        slots
            .into_inner()
            .expect("slot lock")
            .into_iter()
            .map(|r| r.expect("every slot filled"))
            .collect::<Result<_>>()?
    };

    let mut merged = MicrobatchResult {
        grads: network.params.zero_grads(),
        loss_sum: 0.0,
        clamps: 0,
    };
    for r in results {
        for (o, g) in merged.grads.iter_mut().zip(&r.grads) {
            *o += g;
        }
        merged.loss_sum += r.loss_sum;
        merged.clamps += r.clamps;
    }
    Ok(merged)
}

fn check_finite(network: &Network, grads: &[f64]) -> Result<()> {
    if let Some(bad) = grads.iter().position(|v| !v.is_finite()) {
        let group = network
            .params
            .layout()
            .group_of_offset(bad)
            .map(|g| g.name.clone())
            .unwrap_or_else(|| "unknown".into());
        return Err(Error::Numeric(format!(
            "non-finite gradient in parameter group {group:?}; aborting epoch"
        )));
    }
    Ok(())
}

/// Eval-mode positive-class scores, in input order.
pub fn score_all(network: &Network, data: &[EncodedSentence]) -> Result<Vec<f64>> {
    data.iter().map(|s| network.score(&s.ids)).collect()
}

fn dev_loss(network: &Network, dev: &[EncodedSentence]) -> Result<f64> {
    let mut sum = 0.0;
    for s in dev {
        let probs = network.predict_probs(&s.ids)?;
        sum += cross_entropy(&probs, usize::from(s.label)).loss;
    }
    Ok(sum / dev.len().max(1) as f64)
}

/// Train a fresh network, keeping the parameters of the best dev epoch.
///
/// Model selection maximizes dev F1 of the positive class (ties keep the
/// earlier epoch). A dev set without positives downgrades selection to
/// dev loss. Stops after `patience` epochs without improvement.
pub fn train_model(
    model_config: &ModelConfig,
    embeddings: &EmbeddingTable,
    train: &[EncodedSentence],
    dev: &[EncodedSentence],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::Data("training set is empty".into()));
    }
    let network = Network::new(model_config, embeddings)?;
    train_from(network, train, dev, config)
}

/// As [`train_model`] but continuing from an existing network (used by the
/// overfitting sanity checks).
pub fn train_from(
    mut network: Network,
    train: &[EncodedSentence],
    dev: &[EncodedSentence],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    let selection = if dev.iter().any(|s| s.label) {
        SelectionMetric::DevF1
    } else {
        SelectionMetric::DevLoss
    };

    let embedding_spec = network.params.layout().spec("embedding").cloned();
    let embed_dim = network.config().embed_dim;
    let freeze_embeddings = network.config().freeze_embeddings;

    let mut adam = AdamState::new(network.params.data().len());
    let adam_cfg = config.adam();
    let mut best_params: Option<(Vec<f64>, usize)> = None;
    let mut best_score = f64::NEG_INFINITY;
    let mut log = Vec::new();
    let mut clamp_events = 0u64;
    let mut stopped_early = false;

    for epoch in 0..config.max_epochs {
        let mut order: Vec<usize> = (0..train.len()).collect();
        let mut shuffle_rng =
            ChaCha8Rng::seed_from_u64(mix_seed(config.seed, epoch as u64, SHUFFLE_STREAM));
        order.shuffle(&mut shuffle_rng);

        let mut epoch_loss_sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch = make_batch(train, chunk);
            let mut merged = batch_grads(&network, &batch, epoch, config)?;
            clamp_events += merged.clamps;
            epoch_loss_sum += merged.loss_sum;
            if let Some(spec) = &embedding_spec {
                if freeze_embeddings {
                    merged.grads[spec.offset..spec.offset + spec.len()].fill(0.0);
                } else {
                    // PAD row stays zero so padding cannot leak signal.
                    let pad = spec.offset + PAD_ID as usize * embed_dim;
                    merged.grads[pad..pad + embed_dim].fill(0.0);
                }
            }
            check_finite(&network, &merged.grads)?;
            adam_step(network.params.data_mut(), &merged.grads, &mut adam, &adam_cfg);
        }
        let train_loss = epoch_loss_sum / train.len() as f64;
        if !train_loss.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite training loss at epoch {epoch}"
            )));
        }

        let (dev_p, dev_r, dev_f1, score) = if dev.is_empty() {
            (0.0, 0.0, 0.0, -train_loss)
        } else {
            let scores = score_all(&network, dev)?;
            let golds: Vec<bool> = dev.iter().map(|s| s.label).collect();
            let m = prf1(&scores, &golds, 0.5)?;
            let score = match selection {
                SelectionMetric::DevF1 => m.f1,
                SelectionMetric::DevLoss => -dev_loss(&network, dev)?,
            };
            (m.precision, m.recall, m.f1, score)
        };
        log.push(EpochLog {
            epoch,
            train_loss,
            dev_precision: dev_p,
            dev_recall: dev_r,
            dev_f1,
        });

        if score > best_score {
            best_score = score;
            best_params = Some((network.params.data().to_vec(), epoch));
        }
        let best_epoch = best_params.as_ref().map(|(_, e)| *e).unwrap_or(0);
        if epoch.saturating_sub(best_epoch) >= config.patience && config.patience > 0 {
            stopped_early = true;
            break;
        }
    }

    let best_epoch = best_params.as_ref().map(|(_, e)| *e);
    if let Some((data, _)) = best_params {
        network.params.data_mut().copy_from_slice(&data);
    }
    Ok(TrainOutcome {
        network,
        log,
        best_epoch,
        selection,
        clamp_events,
        stopped_early,
    })
}

/// Stream tag separating the shuffle rng from per-sentence dropout rngs.
const SHUFFLE_STREAM: u64 = 0x5e11_7e2c_0ffe_e001;

/// Write the per-epoch log as CSV.
pub fn write_training_log_csv<W: std::io::Write>(mut w: W, log: &[EpochLog]) -> Result<()> {
    writeln!(w, "epoch,train_loss,dev_precision,dev_recall,dev_f1")?;
    for e in log {
        writeln!(
            w,
            "{},{},{},{},{}",
            e.epoch, e.train_loss, e.dev_precision, e.dev_recall, e.dev_f1
        )?;
    }
    Ok(())
}
