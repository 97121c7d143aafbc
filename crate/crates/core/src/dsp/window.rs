//! Dolph-Chebyshev window.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Symmetric Dolph-Chebyshev window of `length` taps with all sidelobes
/// `sidelobe_db` below the mainlobe, normalized to a peak of 1.
///
/// Built by sampling the Chebyshev polynomial frequency response on the
/// DFT grid and inverting it; odd and even lengths need different phase
/// alignment before the inverse transform.
pub fn chebyshev_window(length: usize, sidelobe_db: f64) -> Result<Vec<f64>> {
    if length < 2 {
        return Err(Error::InvalidArgument(format!(
            "window length {length} < 2"
        )));
    }
    if !(sidelobe_db.is_finite() && sidelobe_db > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sidelobe level {sidelobe_db} dB must be positive"
        )));
    }
    let m = length;
    let order = (m - 1) as f64;
    let beta = ((10f64.powf(sidelobe_db / 20.0)).acosh() / order).cosh();
    let response: Vec<f64> = (0..m)
        .map(|k| {
            let x = beta * (PI * k as f64 / m as f64).cos();
            if x > 1.0 {
                (order * x.acosh()).cosh()
            } else if x < -1.0 {
                let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                sign * (order * (-x).acosh()).cosh()
            } else {
                (order * x.acos()).cos()
            }
        })
        .collect();

    let spectrum: Vec<Complex64> = if m % 2 == 1 {
        response.iter().map(|&p| Complex64::new(p, 0.0)).collect()
    } else {
        response
            .iter()
            .enumerate()
            .map(|(k, &p)| Complex64::from_polar(p, PI * k as f64 / m as f64))
            .collect()
    };
    let taps: Vec<f64> = (0..m)
        .map(|n| {
            spectrum
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    (s * Complex64::from_polar(1.0, -2.0 * PI * ((k * n) % m) as f64 / m as f64)).re
                })
                .sum()
        })
        .collect();

    let mut w = if m % 2 == 1 {
        let half = m.div_ceil(2);
        let mut w: Vec<f64> = taps[1..half].iter().rev().copied().collect();
        w.extend_from_slice(&taps[..half]);
        w
    } else {
        let half = m / 2 + 1;
        let mut w: Vec<f64> = taps[1..half].iter().rev().copied().collect();
        w.extend_from_slice(&taps[1..half]);
        w
    };
    let peak = w.iter().copied().fold(f64::MIN, f64::max);
    for v in &mut w {
        *v /= peak;
    }
    Ok(w)
}
