use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// FMCW front-end parameters. Defaults match a 60 GHz short-range sensor
/// with one transmitter and three receivers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadarConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    /// ADC sampling frequency, Hz.
    pub f_s: f64,
    /// Chirps per frame.
    pub n_c: usize,
    /// Samples per chirp.
    pub n_s: usize,
    /// Frame period, s.
    pub t_f: f64,
    /// Chirp-to-chirp time, s.
    pub t_c: f64,
    /// Ramp start frequency, Hz.
    pub f_min: f64,
    /// Ramp stop frequency, Hz.
    pub f_max: f64,
    /// Sweep bandwidth, Hz.
    pub bandwidth: f64,
}

impl Default for RadarConfig {
    fn default() -> Self {
        Self {
            n_tx: 1,
            n_rx: 3,
            f_s: 2e6,
            n_c: 64,
            n_s: 128,
            t_f: 0.050,
            t_c: 391.55e-6,
            f_min: 60.1e9,
            f_max: 61.1e9,
            bandwidth: 1e9,
        }
    }
}

impl RadarConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("f_s", self.f_s),
            ("t_f", self.t_f),
            ("t_c", self.t_c),
            ("f_min", self.f_min),
            ("f_max", self.f_max),
            ("bandwidth", self.bandwidth),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        if self.n_tx == 0 || self.n_rx == 0 {
            return Err(Error::Config("antenna counts must be nonzero".into()));
        }
        if !self.n_s.is_power_of_two()
            || !self.n_c.is_power_of_two()
            || self.n_s < 2
            || self.n_c < 2
        {
            return Err(Error::Config(format!(
                "n_s ({}) and n_c ({}) must be powers of two",
                self.n_s, self.n_c
            )));
        }
        let expected = self.f_max - self.f_min;
        if (self.bandwidth - expected).abs() > 1e-6 * self.bandwidth {
            return Err(Error::Config(format!(
                "bandwidth {} does not equal f_max - f_min = {}",
                self.bandwidth, expected
            )));
        }
        if self.n_c as f64 * self.t_c > self.t_f {
            return Err(Error::Config(
                "chirps do not fit inside the frame period".into(),
            ));
        }
        if self.chirp_active() > self.t_c {
            return Err(Error::Config(
                "sampling window longer than chirp-to-chirp time".into(),
            ));
        }
        Ok(())
    }

    /// Active ramp time: the ADC sampling window n_s / f_s.
    pub fn chirp_active(&self) -> f64 {
        self.n_s as f64 / self.f_s
    }

    pub fn samples_per_frame(&self) -> usize {
        self.n_rx * self.n_c * self.n_s
    }

    /// Retained (non-negative frequency) range bins of a real-input FFT.
    pub fn range_bins(&self) -> usize {
        self.n_s / 2
    }

    /// Beat frequency of a point target at `range` meters.
    pub fn beat_frequency(&self, range: f64) -> f64 {
        2.0 * self.bandwidth * range / (SPEED_OF_LIGHT * self.chirp_active())
    }

    /// Range spacing of adjacent FFT bins, m.
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth)
    }

    /// Fractional range bin of a target at `range` meters.
    pub fn range_bin(&self, range: f64) -> f64 {
        self.beat_frequency(range) * self.n_s as f64 / self.f_s
    }

    /// Largest range whose beat frequency stays below Nyquist.
    pub fn max_range(&self) -> f64 {
        self.range_resolution() * self.range_bins() as f64
    }

    /// Fractional Doppler bin (relative to zero Doppler) of radial velocity `v`.
    pub fn doppler_bin(&self, v: f64) -> f64 {
        2.0 * self.f_min * v * self.t_c * self.n_c as f64 / SPEED_OF_LIGHT
    }

    /// Velocity spacing of adjacent Doppler bins, m/s.
    pub fn velocity_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.f_min * self.t_c * self.n_c as f64)
    }

    pub fn max_velocity(&self) -> f64 {
        self.velocity_resolution() * self.n_c as f64 / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let c = RadarConfig::default();
        c.validate().unwrap();
        assert_eq!(c.bandwidth, c.f_max - c.f_min);
        assert!((c.chirp_active() - 64e-6).abs() < 1e-15);
        assert_eq!(c.range_bins(), 64);
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = RadarConfig::default();
        c.n_s = 100;
        assert!(c.validate().is_err());
        let mut c = RadarConfig::default();
        c.f_s = 0.0;
        assert!(c.validate().is_err());
        let mut c = RadarConfig::default();
        c.bandwidth = 2e9;
        assert!(c.validate().is_err());
    }

    #[test]
    fn bin_conversions_are_consistent() {
        let c = RadarConfig::default();
        let r = 10.0 * c.range_resolution();
        assert!((c.range_bin(r) - 10.0).abs() < 1e-9);
        let v = 5.0 * c.velocity_resolution();
        assert!((c.doppler_bin(v) - 5.0).abs() < 1e-9);
        assert!(c.max_range() > 9.5 && c.max_range() < 9.7);
        assert!(c.max_velocity() > 3.1 && c.max_velocity() < 3.3);
    }
}
