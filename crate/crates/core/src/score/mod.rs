//! Reconstruction and latent-energy scores, and the ID threshold.
//!
//! Both scores grow with how unusual a frame looks: a frame is accepted as
//! in-distribution only when its score is strictly below the calibrated
//! threshold.

mod table;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use table::{
    load_scores, load_threshold, read_scores, read_threshold, save_scores, save_threshold,
    write_scores, write_threshold, ScoreTable, SCORE_HEADER,
};

use crate::ae::{input_batch, Autoencoder, Encoder, LATENT_DIM};
use crate::dsp::RangeDopplerImage;
use crate::error::{shape_err, Error, Result};
use crate::nn::Scalar;
use crate::radar::SceneLabel;

/// Mean squared reconstruction error; for the patch variant the mean of the
/// four per-patch MSEs.
pub fn score_rec(rdi: &RangeDopplerImage, ae: &Autoencoder) -> Result<f64> {
    score_rec_pixels(&rdi.pixels, ae)
}

pub fn score_rec_pixels<T: Scalar>(image: &[T], ae: &Autoencoder<T>) -> Result<f64> {
    Ok(score_batch(&[image], ae)?[0].0)
}

/// LogSumExp over the element-wise sum of the patch latents. Uses only the
/// encoder.
pub fn score_energy(rdi: &RangeDopplerImage, encoder: &Encoder) -> Result<f64> {
    score_energy_pixels(&rdi.pixels, encoder)
}

pub fn score_energy_pixels<T: Scalar>(image: &[T], encoder: &Encoder<T>) -> Result<f64> {
    let latents: Vec<Vec<f64>> = encoder
        .encode_image(image)?
        .into_iter()
        .map(|z| z.into_iter().map(T::as_f64).collect())
        .collect();
    energy_from_latents(&latents)
}

/// `(s_rec, s_energy)` per frame from one batched pass.
fn score_batch<T: Scalar>(images: &[&[T]], ae: &Autoencoder<T>) -> Result<Vec<(f64, f64)>> {
    let variant = ae.variant();
    let input = input_batch(variant, images)?;
    let (z, y) = ae.forward_batch(&input)?;
    let per_frame = variant.inputs_per_frame();
    let px = input.len() / input.shape()[0].max(1);
    let x = input.data();
    let y = y.data();
    let mut out = Vec::with_capacity(images.len());
    for f in 0..images.len() {
        let parts = f * per_frame..(f + 1) * per_frame;
        let rec = parts
            .clone()
            .map(|p| mse(&x[p * px..(p + 1) * px], &y[p * px..(p + 1) * px]))
            .sum::<f64>()
            / per_frame as f64;
        let latents: Vec<Vec<f64>> = parts
            .map(|p| {
                z.data()[p * LATENT_DIM..(p + 1) * LATENT_DIM]
                    .iter()
                    .map(|v| v.as_f64())
                    .collect()
            })
            .collect();
        out.push((rec, energy_from_latents(&latents)?));
    }
    Ok(out)
}

fn mse<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = y.as_f64() - x.as_f64();
            d * d
        })
        .sum::<f64>()
        / a.len() as f64
}

/// Sums latents element-wise, then takes LogSumExp.
pub fn energy_from_latents(latents: &[Vec<f64>]) -> Result<f64> {
    let first = latents
        .first()
        .ok_or_else(|| Error::InvalidArgument("no latent codes".into()))?;
    let mut sum = vec![0.0; first.len()];
    for z in latents {
        if z.len() != sum.len() {
            return shape_err(format!(
                "latent lengths differ: {} vs {}",
                z.len(),
                sum.len()
            ));
        }
        for (s, v) in sum.iter_mut().zip(z) {
            *s += v;
        }
    }
    log_sum_exp(&sum)
}

/// `ln Σ exp(v_j)` in the max-shifted form.
pub fn log_sum_exp(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument(
            "LogSumExp of an empty vector".into(),
        ));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Degenerate(format!("non-finite latent value {bad}")));
    }
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScoreKind {
    #[serde(rename = "REC")]
    Rec,
    #[serde(rename = "ENERGY")]
    Energy,
}

impl ScoreKind {
    pub fn name(self) -> &'static str {
        match self {
            ScoreKind::Rec => "REC",
            ScoreKind::Energy => "ENERGY",
        }
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "REC" => Ok(ScoreKind::Rec),
            "ENERGY" => Ok(ScoreKind::Energy),
            _ => Err(Error::Format(format!("unknown score kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreRecord {
    pub frame_id: u32,
    pub label: SceneLabel,
    pub s_rec: f64,
    pub s_energy: f64,
}

impl ScoreRecord {
    pub fn score(&self, kind: ScoreKind) -> f64 {
        match kind {
            ScoreKind::Rec => self.s_rec,
            ScoreKind::Energy => self.s_energy,
        }
    }
}

const SCORE_CHUNK: usize = 16;

/// Both scores for every frame, in input order.
pub fn score_dataset(rdis: &[RangeDopplerImage], ae: &Autoencoder) -> Result<Vec<ScoreRecord>> {
    let chunks = rdis
        .par_chunks(SCORE_CHUNK)
        .map(|chunk| {
            let images: Vec<&[f32]> = chunk.iter().map(|r| &r.pixels[..]).collect();
            let scores = score_batch(&images, ae)?;
            Ok(chunk
                .iter()
                .zip(scores)
                .map(|(rdi, (s_rec, s_energy))| ScoreRecord {
                    frame_id: rdi.frame_id,
                    label: rdi.label,
                    s_rec,
                    s_energy,
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Id,
    Ood,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub value: f64,
    pub kind: ScoreKind,
    pub quantile: f64,
}

/// Linear-interpolation quantile of sorted data, position `(n − 1)·q`.
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Degenerate(
            "cannot take a quantile of no scores".into(),
        ));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "quantile must lie in (0, 1), got {q}"
        )));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("scores contain NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        return Ok(sorted[lo]);
    }
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

/// τ from in-distribution validation scores.
pub fn calibrate_threshold(id_scores: &[f64], q: f64, kind: ScoreKind) -> Result<Threshold> {
    Ok(Threshold {
        value: quantile(id_scores, q)?,
        kind,
        quantile: q,
    })
}

/// Calibrates from validation records, refusing any non-ID label.
pub fn calibrate_from_records(
    records: &[ScoreRecord],
    q: f64,
    kind: ScoreKind,
) -> Result<Threshold> {
    if let Some(bad) = records.iter().find(|r| !r.label.is_id()) {
        return Err(Error::Protocol(format!(
            "calibration record {} is labeled {}; thresholds use ID validation frames only",
            bad.frame_id, bad.label
        )));
    }
    let scores: Vec<f64> = records.iter().map(|r| r.score(kind)).collect();
    calibrate_threshold(&scores, q, kind)
}

pub fn classify(score: f64, threshold: &Threshold) -> Decision {
    if score < threshold.value {
        Decision::Id
    } else {
        Decision::Ood
    }
}
