//! IF (beat) signal synthesis for point scatterers.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::config::{RadarConfig, SPEED_OF_LIGHT};
use super::scene::{Scatterer, Scene, SceneLabel};
use crate::dsp::window::chebyshev_window;
use crate::error::{Error, Result};

/// Lowest admissible target range, m.
pub const MIN_RANGE: f64 = 0.1;

/// Raw real-valued ADC cube for a run of frames, laid out
/// `(frame, rx, chirp, sample)` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AdcFrameSet {
    pub config: RadarConfig,
    pub frames: Vec<f32>,
    pub labels: Vec<SceneLabel>,
    pub scene_seeds: Vec<u64>,
    pub seed: u64,
}

impl AdcFrameSet {
    pub fn empty(config: RadarConfig, seed: u64) -> Self {
        Self {
            config,
            frames: Vec::new(),
            labels: Vec::new(),
            scene_seeds: Vec::new(),
            seed,
        }
    }

    pub fn n_frames(&self) -> usize {
        self.labels.len()
    }

    pub fn frame(&self, idx: usize) -> &[f32] {
        let len = self.config.samples_per_frame();
        &self.frames[idx * len..(idx + 1) * len]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if self.scene_seeds.len() != n || self.frames.len() != n * self.config.samples_per_frame() {
            return Err(Error::Shape(format!(
                "frame set holds {} samples for {} frames of {} samples",
                self.frames.len(),
                n,
                self.config.samples_per_frame()
            )));
        }
        Ok(())
    }

    /// Appends `other`, which must share this set's radar dimensions.
    pub fn append(&mut self, other: AdcFrameSet) -> Result<()> {
        let (a, b) = (&self.config, &other.config);
        if (a.n_rx, a.n_c, a.n_s) != (b.n_rx, b.n_c, b.n_s) {
            return Err(Error::Shape(format!(
                "cannot join frames of shape ({}, {}, {}) and ({}, {}, {})",
                a.n_rx, a.n_c, a.n_s, b.n_rx, b.n_c, b.n_s
            )));
        }
        self.frames.extend(other.frames);
        self.labels.extend(other.labels);
        self.scene_seeds.extend(other.scene_seeds);
        Ok(())
    }
}

/// Beat signal of one scatterer for one chirp, `n_s` samples.
pub fn beat_signal(
    scatterer: &Scatterer,
    config: &RadarConfig,
    frame_idx: usize,
    chirp_idx: usize,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; config.n_s];
    add_beat_signal(scatterer, config, frame_idx, chirp_idx, &mut out)?;
    Ok(out)
}

fn add_beat_signal(
    scatterer: &Scatterer,
    config: &RadarConfig,
    frame_idx: usize,
    chirp_idx: usize,
    out: &mut [f64],
) -> Result<()> {
    let t_frame = frame_idx as f64 * config.t_f;
    let range = scatterer.range_at_time(t_frame);
    if !(range > MIN_RANGE && range < config.max_range()) {
        return Err(Error::Scene(format!(
            "scatterer range {range:.3} m at frame {frame_idx} outside ({MIN_RANGE}, {:.3}) m",
            config.max_range()
        )));
    }
    if scatterer.amplitude == 0.0 {
        return Ok(());
    }
    let t_slow = chirp_idx as f64 * config.t_c;
    let mut shift = scatterer.motion.velocity(t_frame) * t_slow;
    if let Some(md) = scatterer.micro_doppler {
        shift += md.displacement(t_frame + t_slow) - md.displacement(t_frame);
    }
    let carrier_cycles = (config.f_min * 2.0 * (range + shift) / SPEED_OF_LIGHT).fract();
    let phase0 = 2.0 * PI * carrier_cycles;
    let step = 2.0 * PI * config.beat_frequency(range) / config.f_s;
    for (n, o) in out.iter_mut().enumerate() {
        *o += scatterer.amplitude * (step * n as f64 + phase0).cos();
    }
    Ok(())
}

/// One frame `(n_rx, n_c, n_s)` of `scene`. Noise comes from a ChaCha
/// stream keyed by `(scene.seed, frame_idx)`, so frames can be produced
/// in any order.
pub fn simulate_frame(scene: &Scene, config: &RadarConfig, frame_idx: usize) -> Result<Vec<f32>> {
    let (n_rx, n_c, n_s) = (config.n_rx, config.n_c, config.n_s);
    let mut clean = vec![0.0f64; n_c * n_s];
    for (m, chirp) in clean.chunks_exact_mut(n_s).enumerate() {
        for s in &scene.scatterers {
            add_beat_signal(s, config, frame_idx, m, chirp)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(scene.seed);
    rng.set_stream(frame_idx as u64);
    let mut frame = Vec::with_capacity(n_rx * n_c * n_s);
    for _ in 0..n_rx {
        for &x in &clean {
            let noise = if scene.noise_std > 0.0 {
                let z: f64 = StandardNormal.sample(&mut rng);
                scene.noise_std * z
            } else {
                0.0
            };
            frame.push((x + noise) as f32);
        }
    }
    Ok(frame)
}

pub fn simulate_scene(scene: &Scene, config: &RadarConfig, n_frames: usize) -> Result<AdcFrameSet> {
    config.validate()?;
    scene.validate()?;
    if n_frames == 0 {
        return Err(Error::InvalidArgument("n_frames must be at least 1".into()));
    }
    let frames = (0..n_frames)
        .into_par_iter()
        .map(|f| simulate_frame(scene, config, f))
        .collect::<Result<Vec<_>>>()?;
    Ok(AdcFrameSet {
        config: config.clone(),
        frames: frames.concat(),
        labels: vec![scene.label; n_frames],
        scene_seeds: vec![scene.seed; n_frames],
        seed: scene.seed,
    })
}

/// Concatenates the frames of every `(scene, n_frames)` recipe entry.
pub fn build_dataset(
    recipe: &[(Scene, usize)],
    config: &RadarConfig,
    seed: u64,
) -> Result<AdcFrameSet> {
    if recipe.is_empty() {
        return Err(Error::InvalidArgument("empty dataset recipe".into()));
    }
    let mut out = AdcFrameSet::empty(config.clone(), seed);
    for (scene, n) in recipe {
        out.append(simulate_scene(scene, config, *n)?)?;
    }
    Ok(out)
}

/// ADC noise standard deviation that puts a unit-amplitude point target
/// `snr_db` above the mean noise power in the processed range-Doppler map,
/// assuming 100 dB Chebyshev windows on both axes and coherent Rx averaging.
pub fn noise_std_for_peak_snr(config: &RadarConfig, snr_db: f64) -> Result<f64> {
    let wr = chebyshev_window(config.n_s, 100.0)?;
    let wd = chebyshev_window(config.n_c, 100.0)?;
    let coherent = |w: &[f64]| w.iter().sum::<f64>().powi(2);
    let incoherent = |w: &[f64]| w.iter().map(|x| x * x).sum::<f64>();
    let peak_power = 0.25 * coherent(&wr) * coherent(&wd);
    let noise_per_var = incoherent(&wr) * incoherent(&wd) / config.n_rx as f64;
    let snr = 10f64.powf(snr_db / 10.0);
    Ok((peak_power / (snr * noise_per_var)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radar::scene::{Motion, ScattererKind};

    fn point(motion: Motion, amplitude: f64) -> Scatterer {
        Scatterer::point(ScattererKind::Object, motion, amplitude)
    }

    fn single(motion: Motion, noise_std: f64) -> Scene {
        Scene {
            label: SceneLabel::OodToyCar,
            scatterers: vec![point(motion, 1.0)],
            noise_std,
            seed: 42,
        }
    }

    #[test]
    fn zero_amplitude_gives_zero_signal() {
        let c = RadarConfig::default();
        let s = point(Motion::Static { range: 2.0 }, 0.0);
        assert!(beat_signal(&s, &c, 3, 5).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn out_of_range_rejected() {
        let c = RadarConfig::default();
        for r in [0.05, 12.0] {
            let s = point(Motion::Static { range: r }, 1.0);
            assert!(matches!(beat_signal(&s, &c, 0, 0), Err(Error::Scene(_))));
        }
        let s = point(
            Motion::Linear {
                start: 2.0,
                velocity: -3.0,
            },
            1.0,
        );
        assert!(beat_signal(&s, &c, 0, 0).is_ok());
        assert!(beat_signal(&s, &c, 40, 0).is_err());
    }

    #[test]
    fn beat_tone_sits_on_analytic_bin() {
        // direct DFT of the fast-time samples
        let c = RadarConfig::default();
        let r = 10.0 * c.range_resolution();
        let x = beat_signal(&point(Motion::Static { range: r }, 1.0), &c, 0, 0).unwrap();
        let n = x.len();
        let mag = |k: usize| {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, v) in x.iter().enumerate() {
                let a = -2.0 * PI * (k * i) as f64 / n as f64;
                re += v * a.cos();
                im += v * a.sin();
            }
            (re * re + im * im).sqrt()
        };
        let peak = (0..n / 2)
            .max_by(|&a, &b| mag(a).total_cmp(&mag(b)))
            .unwrap();
        assert_eq!(peak, 10);
        assert!((mag(10) - n as f64 / 2.0).abs() < 1e-6);
    }

    #[test]
    fn doppler_phase_advances_per_chirp() {
        let c = RadarConfig::default();
        let v = 0.8;
        let r = 10.0 * c.range_resolution();
        let s = point(
            Motion::Linear {
                start: r,
                velocity: v,
            },
            1.0,
        );
        let first: Vec<f64> = (0..2)
            .map(|m| beat_signal(&s, &c, 0, m).unwrap()[0])
            .collect();
        let expected = 4.0 * PI * c.f_min * v * c.t_c / SPEED_OF_LIGHT;
        let phase0 = 2.0 * PI * (c.f_min * 2.0 * r / SPEED_OF_LIGHT).fract();
        assert!((first[0] - phase0.cos()).abs() < 1e-9);
        assert!((first[1] - (phase0 + expected).cos()).abs() < 1e-6);
    }

    #[test]
    fn noiseless_rx_channels_identical() {
        let c = RadarConfig::default();
        let set = simulate_scene(&single(Motion::Static { range: 3.0 }, 0.0), &c, 2).unwrap();
        let per_rx = c.n_c * c.n_s;
        for f in 0..2 {
            let fr = set.frame(f);
            assert_eq!(&fr[..per_rx], &fr[per_rx..2 * per_rx]);
            assert_eq!(&fr[..per_rx], &fr[2 * per_rx..]);
        }
    }

    #[test]
    fn simulation_is_deterministic_and_order_free() {
        let c = RadarConfig::default();
        let scene = Scene::generate(SceneLabel::IdWalk, 9, 0.5);
        let a = simulate_scene(&scene, &c, 6).unwrap();
        let b = simulate_scene(&scene, &c, 6).unwrap();
        assert_eq!(a, b);
        let reversed: Vec<Vec<f32>> = (0..6)
            .rev()
            .map(|f| simulate_frame(&scene, &c, f).unwrap())
            .collect();
        for (k, fr) in reversed.iter().rev().enumerate() {
            assert_eq!(fr.as_slice(), a.frame(k));
        }
    }

    #[test]
    fn noise_differs_across_rx() {
        let c = RadarConfig::default();
        let set = simulate_scene(&single(Motion::Static { range: 3.0 }, 0.1), &c, 1).unwrap();
        let per_rx = c.n_c * c.n_s;
        let fr = set.frame(0);
        assert_ne!(&fr[..per_rx], &fr[per_rx..2 * per_rx]);
    }

    #[test]
    fn walking_torso_stays_between_one_and_five_meters() {
        let c = RadarConfig::default();
        for seed in 0..10 {
            let scene = Scene::generate(SceneLabel::IdWalk, seed, 0.0);
            let torso = scene.torso().unwrap();
            for f in 0..100 {
                let r = torso.range_at(f, &c);
                assert!((1.0..=5.0).contains(&r), "seed {seed} frame {f}: {r}");
            }
        }
    }

    #[test]
    fn dataset_single_entry() {
        let c = RadarConfig::default();
        let scene = Scene::generate(SceneLabel::IdWalk, 1, 0.1);
        let d = build_dataset(&[(scene, 10)], &c, 5).unwrap();
        assert_eq!(d.n_frames(), 10);
        assert!(d.labels.iter().all(|l| *l == SceneLabel::IdWalk));
        d.validate().unwrap();
        assert!(build_dataset(&[], &c, 5).is_err());
    }

    #[test]
    fn append_rejects_dimension_mismatch() {
        let c = RadarConfig::default();
        let mut small = c.clone();
        small.n_s = 64;
        let mut a = AdcFrameSet::empty(c, 0);
        assert!(a.append(AdcFrameSet::empty(small, 0)).is_err());
    }

    #[test]
    fn empty_scene_and_zero_frames_rejected() {
        let c = RadarConfig::default();
        let mut scene = single(Motion::Static { range: 2.0 }, 0.0);
        assert!(simulate_scene(&scene, &c, 0).is_err());
        scene.scatterers.clear();
        assert!(simulate_scene(&scene, &c, 1).is_err());
    }
}
