//! `AEWT` weight files.
//!
//! Layout (little endian): magic `AEWT`, u16 version = 1, u64 training
//! seed, u32 tensor count, then per tensor u16 name length, UTF-8 name,
//! u8 rank, u32 per dimension, f32 values.

use std::io::{Read, Write};
use std::path::Path;

use super::model::ModelWeights;
use crate::error::{Error, Result};
use crate::io::{create_file, open_file, ByteReader};
use crate::nn::Tensor;

pub const WEIGHTS_MAGIC: &[u8; 4] = b"AEWT";
pub const WEIGHTS_VERSION: u16 = 1;

/// Writes all tensors, or only `enc.*` when `encoder_only` is set.
pub fn write_weights<W: Write>(weights: &ModelWeights, encoder_only: bool, mut w: W) -> Result<()> {
    weights.variant()?;
    let selected: Vec<_> = weights
        .tensors
        .iter()
        .filter(|(n, _)| !encoder_only || n.starts_with("enc."))
        .collect();
    let mut buf = Vec::new();
    buf.extend_from_slice(WEIGHTS_MAGIC);
    buf.extend_from_slice(&WEIGHTS_VERSION.to_le_bytes());
    buf.extend_from_slice(&weights.seed.to_le_bytes());
    buf.extend_from_slice(&(selected.len() as u32).to_le_bytes());
    for (name, t) in selected {
        buf.extend_from_slice(&(name.len() as u16).to_le_bytes());
        buf.extend_from_slice(name.as_bytes());
        buf.push(t.shape().len() as u8);
        for &d in t.shape() {
            buf.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for &v in t.data() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)
        .and_then(|_| w.flush())
        .map_err(|e| Error::Format(format!("weight write failed: {e}")))
}

pub fn read_weights<R: Read>(r: R) -> Result<ModelWeights> {
    let mut r = ByteReader::new(r);
    r.expect_magic(WEIGHTS_MAGIC, "autoencoder weight")?;
    let version = r.u16()?;
    if version != WEIGHTS_VERSION {
        return Err(Error::Format(format!(
            "unsupported weight file version {version}"
        )));
    }
    let seed = r.u64()?;
    let count = r.u32()? as usize;
    let mut tensors = Vec::with_capacity(count.min(64));
    for _ in 0..count {
        let len = r.u16()? as usize;
        let name = String::from_utf8(r.vec(len)?)
            .map_err(|_| Error::Format("tensor name is not UTF-8".into()))?;
        let rank = r.u8()? as usize;
        let shape = (0..rank)
            .map(|_| r.u32().map(|d| d as usize))
            .collect::<Result<Vec<_>>>()?;
        let n: usize = shape.iter().product();
        if n > 1 << 26 {
            return Err(Error::Format(format!("tensor {name} claims {n} values")));
        }
        let mut raw = Vec::with_capacity(n);
        r.f32_into(n, &mut raw)?;
        tensors.push((name, Tensor::new(shape, raw)?));
    }
    r.expect_eof()?;
    let weights = ModelWeights {
        tensors,
        seed,
        epochs: None,
    };
    weights.variant()?;
    Ok(weights)
}

pub fn save_weights(weights: &ModelWeights, encoder_only: bool, path: &Path) -> Result<()> {
    let mut w = create_file(path)?;
    write_weights(weights, encoder_only, &mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_weights(path: &Path) -> Result<ModelWeights> {
    read_weights(open_file(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ae::model::{Autoencoder, Variant};

    fn weights() -> ModelWeights {
        Autoencoder::<f32>::init(Variant::Patch, 9)
            .unwrap()
            .to_weights(9, Some(30))
    }

    #[test]
    fn round_trip_is_exact() {
        let w = weights();
        let mut bytes = Vec::new();
        write_weights(&w, false, &mut bytes).unwrap();
        assert_eq!(&bytes[..4], b"AEWT");
        let back = read_weights(bytes.as_slice()).unwrap();
        assert_eq!(back.seed, 9);
        assert_eq!(back.tensors, w.tensors);
    }

    #[test]
    fn encoder_only_size() {
        let w = weights();
        let mut bytes = Vec::new();
        write_weights(&w, true, &mut bytes).unwrap();
        let back = read_weights(bytes.as_slice()).unwrap();
        assert!(!back.has_decoder());
        assert_eq!(back.param_count(), 154_496);
        let header = 4 + 2 + 8 + 4;
        let names: usize = back
            .tensors
            .iter()
            .map(|(n, t)| 2 + n.len() + 1 + 4 * t.shape().len())
            .sum();
        assert_eq!(bytes.len() - header - names, 617_984);
    }

    #[test]
    fn corrupt_files_rejected() {
        let w = weights();
        let mut bytes = Vec::new();
        write_weights(&w, false, &mut bytes).unwrap();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_weights(bad.as_slice()),
            Err(Error::Format(_))
        ));
        assert!(read_weights(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(read_weights(extra.as_slice()).is_err());
        // rename the first tensor
        let mut renamed = bytes;
        renamed[18 + 2] = b'x';
        assert!(matches!(
            read_weights(renamed.as_slice()),
            Err(Error::Shape(_))
        ));
    }
}
