//! `FTNS` tensor container.
//!
//! ```text
//! "FTNS" | version u8 = 1 | count u8 |
//!   count × ( label_len u8 | label utf-8 | C u32 | H u32 | W u32 | C·H·W × f32 )
//! ```
//! All integers and floats are little-endian.

use std::fs;
use std::path::Path;

use crate::bytes::ByteReader;
use crate::error::{Error, FormatError, Result};
use crate::tensor::{FeatureTensor, TensorGroup};

pub const TENSOR_MAGIC: [u8; 4] = *b"FTNS";
pub const TENSOR_FORMAT_VERSION: u8 = 1;

pub fn encode_tensor_group(group: &TensorGroup) -> Vec<u8> {
    let payload: usize = group.tensors().map(|t| t.data().len() * 4 + 16).sum();
    let mut out = Vec::with_capacity(6 + payload);
    out.extend_from_slice(&TENSOR_MAGIC);
    out.push(TENSOR_FORMAT_VERSION);
    out.push(group.len() as u8);
    for (label, t) in group.entries() {
        out.push(label.len() as u8);
        out.extend_from_slice(label.as_bytes());
        for d in [t.channels(), t.height(), t.width()] {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for v in t.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_tensor_group(bytes: &[u8]) -> Result<TensorGroup, FormatError> {
    let mut r = ByteReader::new(bytes);
    r.magic(&TENSOR_MAGIC)?;
    let version = r.u8("version")?;
    if version != TENSOR_FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let count = r.u8("tensor count")? as usize;
    if count == 0 || count > TensorGroup::MAX_TENSORS {
        return Err(FormatError::Invariant(format!(
            "tensor count {count} outside 1..={}",
            TensorGroup::MAX_TENSORS
        )));
    }
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let label_len = r.u8("label length")? as usize;
        let label = std::str::from_utf8(r.take(label_len, "label")?)
            .map_err(|_| FormatError::InvalidLabel)?
            .to_owned();
        let c = r.u32("channels")? as usize;
        let h = r.u32("height")? as usize;
        let w = r.u32("width")? as usize;
        if c == 0 || h == 0 || w == 0 {
            return Err(FormatError::Invariant(format!(
                "zero tensor dimension {c}x{h}x{w}"
            )));
        }
        let byte_len = c
            .checked_mul(h)
            .and_then(|n| n.checked_mul(w))
            .and_then(|n| n.checked_mul(4))
            .ok_or_else(|| FormatError::DimensionOverflow(format!("{c}x{h}x{w}")))?;
        let raw = r.take(byte_len, "tensor values")?;
        let data: Vec<f32> = raw
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(FormatError::NonFinite("tensor values"));
        }
        let t =
            FeatureTensor::new(c, h, w, data).map_err(|e| FormatError::Invariant(e.to_string()))?;
        entries.push((label, t));
    }
    if r.remaining() != 0 {
        return Err(FormatError::TrailingBytes(r.remaining()));
    }
    TensorGroup::new(entries).map_err(|e| FormatError::Invariant(e.to_string()))
}

pub fn read_tensor_file(path: impl AsRef<Path>) -> Result<TensorGroup> {
    let bytes = fs::read(path)?;
    Ok(decode_tensor_group(&bytes)?)
}

pub fn write_tensor_file(path: impl AsRef<Path>, group: &TensorGroup) -> Result<()> {
    for t in group.tensors() {
        let (c, h, w) = t.shape();
        if [c, h, w].iter().any(|&d| d > u32::MAX as usize) {
            return Err(Error::domain(format!(
                "dimension of {c}x{h}x{w} does not fit in u32"
            )));
        }
    }
    fs::write(path, encode_tensor_group(group))?;
    Ok(())
}
