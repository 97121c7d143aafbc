//! `RDIF` range-Doppler image files.
//!
//! Layout (little endian): magic `RDIF`, u16 version = 1, u32 n_images,
//! then per image u8 label code, u32 frame id, 4096 f32 pixels (Doppler
//! rows × range columns, row-major).

use std::io::{Read, Write};
use std::path::Path;

use super::chain::{RangeDopplerImage, RDI_PIXELS};
use crate::error::{Error, Result};
use crate::io::{create_file, open_file, ByteReader};
use crate::radar::SceneLabel;

pub const RDI_MAGIC: &[u8; 4] = b"RDIF";
pub const RDI_VERSION: u16 = 1;

pub fn write_rdis<W: Write>(images: &[RangeDopplerImage], mut w: W) -> std::io::Result<()> {
    w.write_all(RDI_MAGIC)?;
    w.write_all(&RDI_VERSION.to_le_bytes())?;
    w.write_all(&(images.len() as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(RDI_PIXELS * 4);
    for img in images {
        w.write_all(&[img.label.code()])?;
        w.write_all(&img.frame_id.to_le_bytes())?;
        buf.clear();
        for p in &img.pixels {
            buf.extend_from_slice(&p.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()
}

pub fn read_rdis<R: Read>(r: R) -> Result<Vec<RangeDopplerImage>> {
    let mut r = ByteReader::new(r);
    r.expect_magic(RDI_MAGIC, "range-Doppler image")?;
    let version = r.u16()?;
    if version != RDI_VERSION {
        return Err(Error::Format(format!(
            "unsupported RDI file version {version}"
        )));
    }
    let n = r.u32()? as usize;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let label = SceneLabel::from_code(r.u8()?)?;
        let frame_id = r.u32()?;
        let mut pixels = Vec::with_capacity(RDI_PIXELS);
        r.f32_into(RDI_PIXELS, &mut pixels)?;
        out.push(RangeDopplerImage::new(pixels, label, frame_id)?);
    }
    r.expect_eof()?;
    Ok(out)
}

pub fn save_rdis(images: &[RangeDopplerImage], path: &Path) -> Result<()> {
    write_rdis(images, create_file(path)?).map_err(|e| Error::io(path, e))
}

pub fn load_rdis(path: &Path) -> Result<Vec<RangeDopplerImage>> {
    read_rdis(open_file(path)?)
}
