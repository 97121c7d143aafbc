//! Point-scatterer scene descriptions and the per-label scene generators.
//!
//! Every trajectory is an analytic function of continuous time so that a
//! frame can be synthesized without knowing how many frames precede it.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::RadarConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SceneLabel {
    #[serde(rename = "ID_WALK")]
    IdWalk,
    #[serde(rename = "OOD_FAN")]
    OodFan,
    #[serde(rename = "OOD_TOY_CAR")]
    OodToyCar,
    #[serde(rename = "OOD_PENDULUM")]
    OodPendulum,
    #[serde(rename = "OOD_ROBOT_VACUUM")]
    OodRobotVacuum,
}

impl SceneLabel {
    pub const ALL: [SceneLabel; 5] = [
        SceneLabel::IdWalk,
        SceneLabel::OodFan,
        SceneLabel::OodToyCar,
        SceneLabel::OodPendulum,
        SceneLabel::OodRobotVacuum,
    ];

    pub const OOD: [SceneLabel; 4] = [
        SceneLabel::OodFan,
        SceneLabel::OodToyCar,
        SceneLabel::OodPendulum,
        SceneLabel::OodRobotVacuum,
    ];

    pub fn code(self) -> u8 {
        match self {
            SceneLabel::IdWalk => 0,
            SceneLabel::OodFan => 1,
            SceneLabel::OodToyCar => 2,
            SceneLabel::OodPendulum => 3,
            SceneLabel::OodRobotVacuum => 4,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.code() == code)
            .ok_or_else(|| Error::Format(format!("unknown label code {code}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            SceneLabel::IdWalk => "ID_WALK",
            SceneLabel::OodFan => "OOD_FAN",
            SceneLabel::OodToyCar => "OOD_TOY_CAR",
            SceneLabel::OodPendulum => "OOD_PENDULUM",
            SceneLabel::OodRobotVacuum => "OOD_ROBOT_VACUUM",
        }
    }

    pub fn is_id(self) -> bool {
        self == SceneLabel::IdWalk
    }
}

impl fmt::Display for SceneLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SceneLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown label {s:?}")))
    }
}

/// One term `amplitude * sin(2π·freq·t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinusoid {
    pub amplitude: f64,
    pub freq: f64,
    pub phase: f64,
}

impl Sinusoid {
    fn value(&self, t: f64) -> f64 {
        self.amplitude * (2.0 * PI * self.freq * t + self.phase).sin()
    }

    fn derivative(&self, t: f64) -> f64 {
        self.amplitude * 2.0 * PI * self.freq * (2.0 * PI * self.freq * t + self.phase).cos()
    }
}

/// Bulk radial motion of a scatterer.
#[derive(Debug, Clone, PartialEq)]
pub enum Motion {
    Static {
        range: f64,
    },
    Linear {
        start: f64,
        velocity: f64,
    },
    /// Constant speed, reflected between `near` and `far`.
    Bounce {
        start: f64,
        speed: f64,
        near: f64,
        far: f64,
    },
    /// `center + Σ terms`.
    Sinusoidal {
        center: f64,
        terms: Vec<Sinusoid>,
    },
}

impl Motion {
    pub fn range(&self, t: f64) -> f64 {
        match self {
            Motion::Static { range } => *range,
            Motion::Linear { start, velocity } => start + velocity * t,
            Motion::Bounce {
                start,
                speed,
                near,
                far,
            } => {
                let (r, _) = bounce(*start, *speed, *near, *far, t);
                r
            }
            Motion::Sinusoidal { center, terms } => {
                center + terms.iter().map(|s| s.value(t)).sum::<f64>()
            }
        }
    }

    pub fn velocity(&self, t: f64) -> f64 {
        match self {
            Motion::Static { .. } => 0.0,
            Motion::Linear { velocity, .. } => *velocity,
            Motion::Bounce {
                start,
                speed,
                near,
                far,
            } => bounce(*start, *speed, *near, *far, t).1,
            Motion::Sinusoidal { terms, .. } => terms.iter().map(|s| s.derivative(t)).sum(),
        }
    }
}

fn bounce(start: f64, speed: f64, near: f64, far: f64, t: f64) -> (f64, f64) {
    let span = far - near;
    let period = 2.0 * span;
    let unfolded = (start - near + speed * t).rem_euclid(period);
    if unfolded <= span {
        (near + unfolded, speed)
    } else {
        (near + period - unfolded, -speed)
    }
}

/// Sinusoidal radial-velocity modulation of a scatterer part (limb, blade).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroDoppler {
    /// Peak velocity offset, m/s.
    pub amplitude: f64,
    pub freq: f64,
    pub phase: f64,
}

impl MicroDoppler {
    pub fn velocity(&self, t: f64) -> f64 {
        self.amplitude * (2.0 * PI * self.freq * t + self.phase).sin()
    }

    /// Range offset whose time derivative is [`MicroDoppler::velocity`].
    pub fn displacement(&self, t: f64) -> f64 {
        -self.amplitude / (2.0 * PI * self.freq) * (2.0 * PI * self.freq * t + self.phase).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScattererKind {
    Torso,
    Limb,
    Object,
    /// Stationary room clutter; removed by MTI.
    Clutter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scatterer {
    pub kind: ScattererKind,
    pub motion: Motion,
    pub amplitude: f64,
    pub micro_doppler: Option<MicroDoppler>,
}

impl Scatterer {
    pub fn point(kind: ScattererKind, motion: Motion, amplitude: f64) -> Self {
        Self {
            kind,
            motion,
            amplitude,
            micro_doppler: None,
        }
    }

    pub fn with_micro_doppler(mut self, md: MicroDoppler) -> Self {
        self.micro_doppler = Some(md);
        self
    }

    /// Range at absolute time `t`.
    pub fn range_at_time(&self, t: f64) -> f64 {
        self.motion.range(t) + self.micro_doppler.map_or(0.0, |m| m.displacement(t))
    }

    pub fn velocity_at_time(&self, t: f64) -> f64 {
        self.motion.velocity(t) + self.micro_doppler.map_or(0.0, |m| m.velocity(t))
    }

    /// Range at the start of frame `frame_idx`.
    pub fn range_at(&self, frame_idx: usize, config: &RadarConfig) -> f64 {
        self.range_at_time(frame_idx as f64 * config.t_f)
    }

    pub fn radial_velocity_at(&self, frame_idx: usize, config: &RadarConfig) -> f64 {
        self.velocity_at_time(frame_idx as f64 * config.t_f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub label: SceneLabel,
    pub scatterers: Vec<Scatterer>,
    pub noise_std: f64,
    pub seed: u64,
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        if self.scatterers.is_empty() {
            return Err(Error::Scene("scene has no scatterers".into()));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(Error::Scene(format!(
                "invalid noise std {}",
                self.noise_std
            )));
        }
        if let Some(s) = self
            .scatterers
            .iter()
            .find(|s| !(s.amplitude.is_finite() && s.amplitude >= 0.0))
        {
            return Err(Error::Scene(format!("invalid amplitude {}", s.amplitude)));
        }
        if self.label == SceneLabel::IdWalk {
            let torsos = self.count(ScattererKind::Torso);
            let limbs = self.count(ScattererKind::Limb);
            if torsos != 1 || !(2..=4).contains(&limbs) {
                return Err(Error::Scene(format!(
                    "walking scene needs one torso and 2-4 limbs, got {torsos} and {limbs}"
                )));
            }
        }
        Ok(())
    }

    fn count(&self, kind: ScattererKind) -> usize {
        self.scatterers.iter().filter(|s| s.kind == kind).count()
    }

    pub fn torso(&self) -> Option<&Scatterer> {
        self.scatterers
            .iter()
            .find(|s| s.kind == ScattererKind::Torso)
    }

    /// Draws a randomized scene of the given label. Same `(label, seed)`
    /// always yields the same scene.
    pub fn generate(label: SceneLabel, seed: u64, noise_std: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut scatterers = match label {
            SceneLabel::IdWalk => walking_human(&mut rng),
            SceneLabel::OodFan => table_fan(&mut rng),
            SceneLabel::OodToyCar => toy_car(&mut rng),
            SceneLabel::OodPendulum => pendulum(&mut rng),
            SceneLabel::OodRobotVacuum => robot_vacuum(&mut rng),
        };
        scatterers.extend(room_clutter(&mut rng));
        Self {
            label,
            scatterers,
            noise_std,
            seed,
        }
    }
}

/// Sum-of-sinusoids trajectory kept inside `[near, far]` with peak speed
/// at most `max_speed`.
fn wander(rng: &mut ChaCha8Rng, near: f64, far: f64, max_speed: f64, n_terms: usize) -> Motion {
    let center = rng.random_range(near + 0.4 * (far - near)..near + 0.6 * (far - near));
    let reach = (center - near).min(far - center);
    let weights: Vec<f64> = (0..n_terms).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let spread = rng.random_range(0.6..0.98) * reach;
    let mut terms: Vec<Sinusoid> = weights
        .iter()
        .map(|w| Sinusoid {
            amplitude: spread * w / total,
            freq: rng.random_range(0.02..0.12),
            phase: rng.random_range(0.0..2.0 * PI),
        })
        .collect();
    let speed_bound: f64 = terms.iter().map(|s| 2.0 * PI * s.freq * s.amplitude).sum();
    let scale = max_speed / speed_bound;
    for s in &mut terms {
        s.freq *= scale;
    }
    Motion::Sinusoidal { center, terms }
}

fn walking_human(rng: &mut ChaCha8Rng) -> Vec<Scatterer> {
    let max_speed = rng.random_range(0.8..1.5);
    let torso_motion = wander(rng, 1.0, 5.0, max_speed, 3);
    let cadence = rng.random_range(0.5..2.0);
    let gait_phase = rng.random_range(0.0..2.0 * PI);
    let n_limbs = rng.random_range(2..=4usize);
    let mut parts = vec![Scatterer::point(
        ScattererKind::Torso,
        torso_motion.clone(),
        1.0,
    )];
    for k in 0..n_limbs {
        let md = MicroDoppler {
            amplitude: rng.random_range(0.5..2.0),
            freq: cadence,
            phase: gait_phase + PI * k as f64 + rng.random_range(-0.3..0.3),
        };
        let amplitude = rng.random_range(0.25..0.5);
        parts.push(
            Scatterer::point(ScattererKind::Limb, torso_motion.clone(), amplitude)
                .with_micro_doppler(md),
        );
    }
    parts
}

fn table_fan(rng: &mut ChaCha8Rng) -> Vec<Scatterer> {
    let range = rng.random_range(1.0..5.0);
    let rotation = rng.random_range(8.0..20.0);
    let tip_speed = rng.random_range(1.0..3.0);
    let offset = rng.random_range(0.0..2.0 * PI);
    let n_blades = rng.random_range(3..=4usize);
    let mut parts = vec![Scatterer::point(
        ScattererKind::Object,
        Motion::Static { range },
        0.8,
    )];
    for k in 0..n_blades {
        let md = MicroDoppler {
            amplitude: tip_speed,
            freq: rotation,
            phase: offset + 2.0 * PI * k as f64 / n_blades as f64,
        };
        let amplitude = rng.random_range(0.4..0.8);
        parts.push(
            Scatterer::point(ScattererKind::Object, Motion::Static { range }, amplitude)
                .with_micro_doppler(md),
        );
    }
    parts
}

fn toy_car(rng: &mut ChaCha8Rng) -> Vec<Scatterer> {
    let near = rng.random_range(1.0..2.0);
    let far = rng.random_range(3.5..5.0);
    let motion = Motion::Bounce {
        start: rng.random_range(near..far),
        speed: rng.random_range(1.5..3.0),
        near,
        far,
    };
    vec![Scatterer::point(
        ScattererKind::Object,
        motion,
        rng.random_range(0.5..1.0),
    )]
}

fn pendulum(rng: &mut ChaCha8Rng) -> Vec<Scatterer> {
    let center = rng.random_range(1.5..4.5);
    let freq = rng.random_range(0.3..1.2);
    let n = rng.random_range(1..=3usize);
    (0..n)
        .map(|_| {
            let motion = Motion::Sinusoidal {
                center: center + rng.random_range(-0.3..0.3),
                terms: vec![Sinusoid {
                    amplitude: rng.random_range(0.05..0.3),
                    freq: freq * rng.random_range(0.9..1.1),
                    phase: rng.random_range(0.0..2.0 * PI),
                }],
            };
            Scatterer::point(ScattererKind::Object, motion, rng.random_range(0.4..1.0))
        })
        .collect()
}

fn robot_vacuum(rng: &mut ChaCha8Rng) -> Vec<Scatterer> {
    let max_speed = rng.random_range(0.15..0.45);
    let motion = wander(rng, 1.0, 5.0, max_speed, 2);
    vec![Scatterer::point(
        ScattererKind::Object,
        motion,
        rng.random_range(0.6..1.0),
    )]
}

fn room_clutter(rng: &mut ChaCha8Rng) -> Vec<Scatterer> {
    let n = rng.random_range(1..=3usize);
    (0..n)
        .map(|_| {
            let motion = Motion::Static {
                range: rng.random_range(0.5..9.0),
            };
            Scatterer::point(ScattererKind::Clutter, motion, rng.random_range(0.5..3.0))
        })
        .collect()
}
