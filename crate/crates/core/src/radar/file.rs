//! `RADC` ADC frame files.
//!
//! Layout (little endian): magic `RADC`, u16 version = 1, u32 n_frames,
//! u16 n_rx, u16 n_c, u16 n_s, u64 dataset seed, then per frame
//! u8 label code, u64 scene seed, n_rx·n_c·n_s f32 samples.

use std::io::{Read, Write};
use std::path::Path;

use super::config::RadarConfig;
use super::scene::SceneLabel;
use super::sim::AdcFrameSet;
use crate::error::{Error, Result};
use crate::io::{create_file, open_file, ByteReader};

pub const ADC_MAGIC: &[u8; 4] = b"RADC";
pub const ADC_VERSION: u16 = 1;

pub fn write_adc<W: Write>(set: &AdcFrameSet, mut w: W) -> std::io::Result<()> {
    let c = &set.config;
    w.write_all(ADC_MAGIC)?;
    w.write_all(&ADC_VERSION.to_le_bytes())?;
    w.write_all(&(set.n_frames() as u32).to_le_bytes())?;
    w.write_all(&(c.n_rx as u16).to_le_bytes())?;
    w.write_all(&(c.n_c as u16).to_le_bytes())?;
    w.write_all(&(c.n_s as u16).to_le_bytes())?;
    w.write_all(&set.seed.to_le_bytes())?;
    let mut buf = Vec::with_capacity(c.samples_per_frame() * 4);
    for f in 0..set.n_frames() {
        w.write_all(&[set.labels[f].code()])?;
        w.write_all(&set.scene_seeds[f].to_le_bytes())?;
        buf.clear();
        for x in set.frame(f) {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()
}

/// Reads a frame file. Dimensions in the header must match `config`.
pub fn read_adc<R: Read>(r: R, config: &RadarConfig) -> Result<AdcFrameSet> {
    let mut r = ByteReader::new(r);
    r.expect_magic(ADC_MAGIC, "ADC frame")?;
    let version = r.u16()?;
    if version != ADC_VERSION {
        return Err(Error::Format(format!(
            "unsupported ADC file version {version}"
        )));
    }
    let n_frames = r.u32()? as usize;
    let dims = (r.u16()? as usize, r.u16()? as usize, r.u16()? as usize);
    if dims != (config.n_rx, config.n_c, config.n_s) {
        return Err(Error::Format(format!(
            "ADC file dims {:?} do not match radar config ({}, {}, {})",
            dims, config.n_rx, config.n_c, config.n_s
        )));
    }
    let seed = r.u64()?;
    let per = config.samples_per_frame();
    let mut set = AdcFrameSet::empty(config.clone(), seed);
    set.frames.reserve(n_frames * per);
    for _ in 0..n_frames {
        set.labels.push(SceneLabel::from_code(r.u8()?)?);
        set.scene_seeds.push(r.u64()?);
        r.f32_into(per, &mut set.frames)?;
    }
    r.expect_eof()?;
    Ok(set)
}

pub fn save_adc(set: &AdcFrameSet, path: &Path) -> Result<()> {
    let w = create_file(path)?;
    write_adc(set, w).map_err(|e| Error::io(path, e))
}

pub fn load_adc(path: &Path, config: &RadarConfig) -> Result<AdcFrameSet> {
    read_adc(open_file(path)?, config)
}
