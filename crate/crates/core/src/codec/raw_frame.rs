//! Planar raw-frame exchange format.
//!
//! `width u32 | height u32 | bit_depth u8 | height·width × u16`, all
//! little-endian. A sequence file is a concatenation of such records.

use crate::bytes::ByteReader;
use crate::conversion::{max_level, MAX_BIT_DEPTH};
use crate::error::FormatError;
use crate::frame::SampleFrame;

pub const RAW_FRAME_HEADER_LEN: usize = 9;

pub fn write_raw_frame(out: &mut Vec<u8>, frame: &SampleFrame, bit_depth: u8) {
    out.reserve(RAW_FRAME_HEADER_LEN + frame.samples().len() * 2);
    out.extend_from_slice(&(frame.width() as u32).to_le_bytes());
    out.extend_from_slice(&(frame.height() as u32).to_le_bytes());
    out.push(bit_depth);
    for &s in frame.samples() {
        out.extend_from_slice(&s.to_le_bytes());
    }
}

pub fn encode_raw_frame(frame: &SampleFrame, bit_depth: u8) -> Vec<u8> {
    let mut out = Vec::new();
    write_raw_frame(&mut out, frame, bit_depth);
    out
}

/// Parses one record; returns the frame, its bit depth and the bytes consumed.
pub fn read_raw_frame(bytes: &[u8]) -> Result<(SampleFrame, u8, usize), FormatError> {
    let mut r = ByteReader::new(bytes);
    let width = r.u32("raw frame width")? as usize;
    let height = r.u32("raw frame height")? as usize;
    let bit_depth = r.u8("raw frame bit depth")?;
    if bit_depth == 0 || bit_depth > MAX_BIT_DEPTH {
        return Err(FormatError::Invariant(format!(
            "raw frame bit depth {bit_depth}"
        )));
    }
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(2))
        .ok_or_else(|| FormatError::DimensionOverflow(format!("{width}x{height}")))?;
    let raw = r.take(len, "raw frame samples")?;
    let top = max_level(bit_depth);
    let mut samples = Vec::with_capacity(len / 2);
    for b in raw.chunks_exact(2) {
        let s = u16::from_le_bytes([b[0], b[1]]);
        if s as u32 > top {
            return Err(FormatError::Invariant(format!(
                "sample {s} exceeds {bit_depth}-bit range"
            )));
        }
        samples.push(s);
    }
    let frame = SampleFrame::new(height, width, samples)
        .map_err(|e| FormatError::Invariant(e.to_string()))?;
    Ok((frame, bit_depth, r.position()))
}

/// Parses a whole sequence file.
pub fn read_raw_frames(mut bytes: &[u8]) -> Result<Vec<(SampleFrame, u8)>, FormatError> {
    let mut frames = Vec::new();
    while !bytes.is_empty() {
        let (f, depth, used) = read_raw_frame(bytes)?;
        frames.push((f, depth));
        bytes = &bytes[used..];
    }
    Ok(frames)
}
