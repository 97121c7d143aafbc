//! Train/validation/test recipes for the synthetic benchmark.

use serde::{Deserialize, Serialize};

use super::config::RadarConfig;
use super::scene::{Scene, SceneLabel};
use super::sim::noise_std_for_peak_snr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    fn tag(self) -> u64 {
        match self {
            Split::Train => 0x7452_4149_4e00_0001,
            Split::Val => 0x5641_4c00_0000_0002,
            Split::Test => 0x5445_5354_0000_0003,
        }
    }
}

/// Frame counts and scene granularity of the three splits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSpec {
    /// ID frames before the validation hold-out.
    pub id_train_frames: usize,
    /// Fraction of `id_train_frames` held out for threshold calibration.
    pub val_fraction: f64,
    pub id_test_frames: usize,
    /// Split evenly across the four OOD labels.
    pub ood_test_frames: usize,
    /// Frames per recorded scene.
    pub frames_per_scene: usize,
    /// Peak SNR of a unit point target in the processed map, dB.
    pub peak_snr_db: f64,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        Self {
            id_train_frames: 2500,
            val_fraction: 0.2,
            id_test_frames: 500,
            ood_test_frames: 600,
            frames_per_scene: 50,
            peak_snr_db: 20.0,
        }
    }
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.frames_per_scene == 0 {
            return Err(Error::Config("frames_per_scene must be positive".into()));
        }
        if !(self.val_fraction > 0.0 && self.val_fraction < 1.0) {
            return Err(Error::Config("val_fraction must lie in (0, 1)".into()));
        }
        if self.id_train_frames == 0 || self.id_test_frames == 0 || self.ood_test_frames == 0 {
            return Err(Error::Config("every split needs frames".into()));
        }
        if !self.peak_snr_db.is_finite() {
            return Err(Error::Config("peak_snr_db must be finite".into()));
        }
        let (train, val) = self.train_val_counts();
        if train == 0 || val == 0 {
            return Err(Error::Config(
                "validation split leaves an empty train or val set".into(),
            ));
        }
        Ok(())
    }

    pub fn train_val_counts(&self) -> (usize, usize) {
        let val = (self.id_train_frames as f64 * self.val_fraction).round() as usize;
        (self.id_train_frames - val, val)
    }

    /// Scene recipe for one split. Scene seeds are keyed by `(seed, split,
    /// index)` so no scene is shared between splits.
    pub fn recipe(
        &self,
        split: Split,
        config: &RadarConfig,
        seed: u64,
    ) -> Result<Vec<(Scene, usize)>> {
        self.validate()?;
        let noise = noise_std_for_peak_snr(config, self.peak_snr_db)?;
        let mut entries: Vec<(SceneLabel, usize)> = Vec::new();
        match split {
            Split::Train => entries.push((SceneLabel::IdWalk, self.train_val_counts().0)),
            Split::Val => entries.push((SceneLabel::IdWalk, self.train_val_counts().1)),
            Split::Test => {
                entries.push((SceneLabel::IdWalk, self.id_test_frames));
                let per = self.ood_test_frames / SceneLabel::OOD.len();
                let extra = self.ood_test_frames % SceneLabel::OOD.len();
                for (k, label) in SceneLabel::OOD.into_iter().enumerate() {
                    entries.push((label, per + usize::from(k < extra)));
                }
            }
        }
        let mut recipe = Vec::new();
        let mut index = 0u64;
        for (label, frames) in entries {
            let mut left = frames;
            while left > 0 {
                let n = left.min(self.frames_per_scene);
                let scene_seed = scene_seed(seed, split, index);
                recipe.push((Scene::generate(label, scene_seed, noise), n));
                left -= n;
                index += 1;
            }
        }
        Ok(recipe)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent 64-bit seed from `seed` and a stream tag.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(seed ^ 0x005e_ed0f_5eed) ^ tag)
}

pub fn scene_seed(dataset_seed: u64, split: Split, index: u64) -> u64 {
    derive_seed(derive_seed(dataset_seed, split.tag()), index)
}
