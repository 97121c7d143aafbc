//! Autoencoder training on in-distribution maps.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{input_batch, Autoencoder, ModelWeights, Variant};
use crate::dsp::RangeDopplerImage;
use crate::error::{Error, Result};
use crate::nn::{bce_grad, bce_loss, AdamState, Gradients, Scalar};
use crate::radar::derive_seed;

const SHUFFLE_TAG: u64 = 0x5f1e;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Frames per optimizer step; each patch-variant frame contributes four
    /// patches.
    pub batch_frames: usize,
    pub lr: f64,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            batch_frames: 8,
            lr: 1e-3,
            seed: 0,
            shuffle: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_frames == 0 {
            return Err(Error::Config(
                "epochs and batch_frames must be at least 1".into(),
            ));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.lr
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub weights: ModelWeights,
    /// Mean per-frame loss of each epoch.
    pub loss_history: Vec<f64>,
}

/// Mean loss over a batch of frames and its parameter gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchGradients<T = f32> {
    pub loss: f64,
    pub encoder: Gradients<T>,
    pub decoder: Gradients<T>,
}

/// BCE between each target (row-major 64×64) and its reconstruction,
/// averaged over frames, with gradients for both networks. Every frame has
/// the same pixel count, so the batch mean equals the pixel mean over the
/// whole batch; for the patch variant the reassembled frame and its four
/// patches hold the same pixels, so the loss is taken on the patch batch
/// directly.
pub fn batch_gradients<T: Scalar>(
    ae: &Autoencoder<T>,
    targets: &[&[T]],
) -> Result<BatchGradients<T>> {
    if targets.is_empty() {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    let input = input_batch(ae.variant(), targets)?;
    let enc_cache = ae.encoder.net.forward_cached(&input)?;
    let dec_cache = ae.decoder.net.forward_cached(&enc_cache.output)?;
    let loss = bce_loss(&dec_cache.output, &input)?;
    let grad = bce_grad(&dec_cache.output, &input)?;
    let (decoder, latent_grad) = ae.decoder.net.backward(&dec_cache, &grad, true)?;
    let latent_grad = latent_grad.expect("input gradient requested");
    let (encoder, _) = ae.encoder.net.backward(&enc_cache, &latent_grad, false)?;
    Ok(BatchGradients {
        loss,
        encoder,
        decoder,
    })
}

fn check_protocol(rdis: &[RangeDopplerImage]) -> Result<()> {
    if rdis.is_empty() {
        return Err(Error::Degenerate("training set is empty".into()));
    }
    if let Some(bad) = rdis.iter().find(|r| !r.label.is_id()) {
        return Err(Error::Protocol(format!(
            "frame {} is labeled {}; training uses in-distribution frames only",
            bad.frame_id, bad.label
        )));
    }
    Ok(())
}

/// Epoch order: identity, or a permutation drawn from the seed and epoch.
pub fn epoch_order(n: usize, cfg: &TrainConfig, epoch: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if cfg.shuffle {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, SHUFFLE_TAG));
        rng.set_stream(epoch as u64);
        order.shuffle(&mut rng);
    }
    order
}

/// Trains `variant` from a seeded initialization. `on_epoch` receives the
/// 1-based epoch number and its mean loss.
pub fn train_variant(
    rdis: &[RangeDopplerImage],
    variant: Variant,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<TrainOutcome> {
    cfg.validate()?;
    check_protocol(rdis)?;
    let mut ae = Autoencoder::<f32>::init(variant, cfg.seed)?;
    let mut enc_opt = AdamState::new(ae.encoder.net.params(), cfg.lr);
    let mut dec_opt = AdamState::new(ae.decoder.net.params(), cfg.lr);
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let order = epoch_order(rdis.len(), cfg, epoch);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_frames) {
            let targets: Vec<&[f32]> = batch.iter().map(|&i| &rdis[i].pixels[..]).collect();
            let g = batch_gradients(&ae, &targets)?;
            epoch_loss += g.loss * batch.len() as f64;
            enc_opt.step(ae.encoder.net.params_mut(), g.encoder.tensors())?;
            dec_opt.step(ae.decoder.net.params_mut(), g.decoder.tensors())?;
        }
        let mean = epoch_loss / rdis.len() as f64;
        if !mean.is_finite() {
            return Err(Error::Degenerate(format!(
                "loss became non-finite in epoch {}",
                epoch + 1
            )));
        }
        history.push(mean);
        on_epoch(epoch + 1, mean);
    }
    Ok(TrainOutcome {
        weights: ae.to_weights(cfg.seed, Some(cfg.epochs as u32)),
        loss_history: history,
    })
}

/// Patch-based autoencoder.
pub fn train(rdis: &[RangeDopplerImage], cfg: &TrainConfig) -> Result<TrainOutcome> {
    train_variant(rdis, Variant::Patch, cfg, |_, _| {})
}

/// Full-image baseline autoencoder.
pub fn train_baseline(rdis: &[RangeDopplerImage], cfg: &TrainConfig) -> Result<TrainOutcome> {
    train_variant(rdis, Variant::FullImage, cfg, |_, _| {})
}
