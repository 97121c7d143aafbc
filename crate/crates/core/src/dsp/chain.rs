//! Range FFT, MTI, Doppler FFT and log normalization.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::window::chebyshev_window;
use crate::error::{shape_err, Error, Result};
use crate::radar::{AdcFrameSet, RadarConfig, SceneLabel};

pub const RDI_SIZE: usize = 64;
pub const RDI_PIXELS: usize = RDI_SIZE * RDI_SIZE;
pub const WINDOW_SIDELOBE_DB: f64 = 100.0;
/// Dynamic range kept below the per-frame peak.
pub const DYNAMIC_RANGE_DB: f64 = 60.0;

/// Rx-collapsed complex range profile of every chirp, `(n_chirps, n_bins)`
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeSpectrum {
    pub n_chirps: usize,
    pub n_bins: usize,
    pub values: Vec<Complex64>,
}

impl RangeSpectrum {
    pub fn zeros(n_chirps: usize, n_bins: usize) -> Self {
        Self {
            n_chirps,
            n_bins,
            values: vec![Complex64::new(0.0, 0.0); n_chirps * n_bins],
        }
    }

    pub fn at(&self, chirp: usize, bin: usize) -> Complex64 {
        self.values[chirp * self.n_bins + bin]
    }
}

/// A normalized 64×64 range-Doppler map: rows are Doppler bins with zero
/// Doppler at row 32, columns are range bins. Pixels lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerImage {
    pub pixels: Vec<f32>,
    pub label: SceneLabel,
    pub frame_id: u32,
}

impl RangeDopplerImage {
    pub fn new(pixels: Vec<f32>, label: SceneLabel, frame_id: u32) -> Result<Self> {
        if pixels.len() != RDI_PIXELS {
            return shape_err(format!(
                "RDI needs {RDI_PIXELS} pixels, got {}",
                pixels.len()
            ));
        }
        Ok(Self {
            pixels,
            label,
            frame_id,
        })
    }

    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.pixels[row * RDI_SIZE + col]
    }
}

/// FFT plans and windows for one radar configuration.
pub struct Preprocessor {
    config: RadarConfig,
    range_window: Vec<f64>,
    doppler_window: Vec<f64>,
    range_plan: Arc<dyn Fft<f64>>,
    doppler_plan: Arc<dyn Fft<f64>>,
}

impl Preprocessor {
    /// 100 dB Chebyshev windows on both axes.
    pub fn new(config: &RadarConfig) -> Result<Self> {
        let range_window = chebyshev_window(config.n_s, WINDOW_SIDELOBE_DB)?;
        let doppler_window = chebyshev_window(config.n_c, WINDOW_SIDELOBE_DB)?;
        Self::with_windows(config, range_window, doppler_window)
    }

    pub fn with_windows(
        config: &RadarConfig,
        range_window: Vec<f64>,
        doppler_window: Vec<f64>,
    ) -> Result<Self> {
        config.validate()?;
        if range_window.len() != config.n_s {
            return shape_err(format!(
                "range window length {} != n_s {}",
                range_window.len(),
                config.n_s
            ));
        }
        if doppler_window.len() != config.n_c {
            return shape_err(format!(
                "Doppler window length {} != n_c {}",
                doppler_window.len(),
                config.n_c
            ));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            config: config.clone(),
            range_plan: planner.plan_fft_forward(config.n_s),
            doppler_plan: planner.plan_fft_forward(config.n_c),
            range_window,
            doppler_window,
        })
    }

    pub fn config(&self) -> &RadarConfig {
        &self.config
    }

    /// Fast-time mean removal, window, FFT and Rx averaging. Keeps the
    /// non-negative half of the spectrum.
    pub fn range_fft<T: Copy + Into<f64>>(&self, frame: &[T]) -> Result<RangeSpectrum> {
        let c = &self.config;
        if frame.len() != c.samples_per_frame() {
            return shape_err(format!(
                "frame has {} samples, expected {}",
                frame.len(),
                c.samples_per_frame()
            ));
        }
        let bins = c.range_bins();
        let mut out = RangeSpectrum::zeros(c.n_c, bins);
        let mut buf = vec![Complex64::new(0.0, 0.0); c.n_s];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.range_plan.get_inplace_scratch_len()];
        for rx in frame.chunks_exact(c.n_c * c.n_s) {
            for (chirp, samples) in rx.chunks_exact(c.n_s).enumerate() {
                let mean = samples.iter().map(|&x| x.into()).sum::<f64>() / c.n_s as f64;
                for ((b, &x), &w) in buf.iter_mut().zip(samples).zip(&self.range_window) {
                    *b = Complex64::new((x.into() - mean) * w, 0.0);
                }
                self.range_plan.process_with_scratch(&mut buf, &mut scratch);
                for (acc, v) in out.values[chirp * bins..(chirp + 1) * bins]
                    .iter_mut()
                    .zip(&buf)
                {
                    *acc += v;
                }
            }
        }
        let scale = 1.0 / c.n_rx as f64;
        for v in &mut out.values {
            *v *= scale;
        }
        Ok(out)
    }

    /// Slow-time window, FFT and shift; output `(n_c, n_bins)` with zero
    /// Doppler at row `n_c / 2`.
    pub fn doppler_fft(&self, spectrum: &RangeSpectrum) -> Result<Vec<Complex64>> {
        let n_c = self.config.n_c;
        if spectrum.n_chirps != n_c || spectrum.values.len() != spectrum.n_chirps * spectrum.n_bins
        {
            return shape_err(format!(
                "spectrum has {} chirps, expected {n_c}",
                spectrum.n_chirps
            ));
        }
        let bins = spectrum.n_bins;
        let mut out = vec![Complex64::new(0.0, 0.0); n_c * bins];
        let mut buf = vec![Complex64::new(0.0, 0.0); n_c];
        let mut scratch =
            vec![Complex64::new(0.0, 0.0); self.doppler_plan.get_inplace_scratch_len()];
        for bin in 0..bins {
            for (m, b) in buf.iter_mut().enumerate() {
                *b = spectrum.at(m, bin) * self.doppler_window[m];
            }
            self.doppler_plan
                .process_with_scratch(&mut buf, &mut scratch);
            for (k, v) in buf.iter().enumerate() {
                let row = (k + n_c / 2) % n_c;
                out[row * bins + bin] = *v;
            }
        }
        Ok(out)
    }

    /// Full chain for one frame.
    pub fn frame_to_rdi(
        &self,
        frame: &[f32],
        label: SceneLabel,
        frame_id: u32,
    ) -> Result<RangeDopplerImage> {
        let c = &self.config;
        if c.n_c != RDI_SIZE || c.range_bins() != RDI_SIZE {
            return Err(Error::Config(format!(
                "a {RDI_SIZE}x{RDI_SIZE} map needs n_c = {RDI_SIZE} and n_s = {}, got n_c = {}, n_s = {}",
                2 * RDI_SIZE,
                c.n_c,
                c.n_s
            )));
        }
        let spectrum = mti_filter(&self.range_fft(frame)?);
        let rd = self.doppler_fft(&spectrum)?;
        // sqrt(re² + im²) rather than hypot keeps power-of-two scaling exact
        let mags: Vec<f64> = rd
            .iter()
            .map(|v| (v.re * v.re + v.im * v.im).sqrt())
            .collect();
        RangeDopplerImage::new(normalize_rdi(&mags), label, frame_id)
    }

    pub fn preprocess(&self, frames: &AdcFrameSet) -> Result<Vec<RangeDopplerImage>> {
        frames.validate()?;
        let c = &frames.config;
        if (c.n_rx, c.n_c, c.n_s) != (self.config.n_rx, self.config.n_c, self.config.n_s) {
            return shape_err("frame set dimensions differ from the preprocessor's radar config");
        }
        (0..frames.n_frames())
            .into_par_iter()
            .map(|f| self.frame_to_rdi(frames.frame(f), frames.labels[f], f as u32))
            .collect()
    }
}

/// Removes the slow-time mean of every range bin, nulling zero-Doppler
/// (static) returns within the frame.
pub fn mti_filter(spectrum: &RangeSpectrum) -> RangeSpectrum {
    let mut out = spectrum.clone();
    let n = spectrum.n_chirps as f64;
    for bin in 0..spectrum.n_bins {
        let mean = (0..spectrum.n_chirps)
            .map(|m| spectrum.at(m, bin))
            .sum::<Complex64>()
            / n;
        for m in 0..spectrum.n_chirps {
            out.values[m * spectrum.n_bins + bin] -= mean;
        }
    }
    out
}

/// Log-compresses magnitudes relative to their peak, keeps the top
/// [`DYNAMIC_RANGE_DB`], and maps that span affinely onto `[0, 1]`. An
/// all-zero input maps to an all-zero image.
///
/// Working with the ratio to the peak makes the map exactly invariant to
/// power-of-two scaling of the input.
pub fn normalize_rdi(magnitudes: &[f64]) -> Vec<f32> {
    let peak = magnitudes.iter().copied().fold(0.0f64, f64::max);
    if !(peak > 0.0 && peak.is_finite()) {
        return vec![0.0; magnitudes.len()];
    }
    magnitudes
        .iter()
        .map(|&m| {
            let db = 20.0 * (m / peak).log10();
            ((db + DYNAMIC_RANGE_DB) / DYNAMIC_RANGE_DB).clamp(0.0, 1.0) as f32
        })
        .collect()
}
