//! Pixel-domain tools: bit-depth truncation/restoration and fixed-ratio
//! temporal resampling/restoration.

use crate::bytes::ByteReader;
use crate::error::{Error, FormatError, Result};
use crate::frame::SampleFrame;

pub const MAX_PIXEL_BIT_DEPTH: u8 = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct PixelSequence {
    frames: Vec<SampleFrame>,
    bit_depth: u8,
    frame_rate: f64,
}

impl PixelSequence {
    pub fn new(frames: Vec<SampleFrame>, bit_depth: u8, frame_rate: f64) -> Result<Self> {
        if bit_depth == 0 || bit_depth > MAX_PIXEL_BIT_DEPTH {
            return Err(Error::domain(format!(
                "bit depth {bit_depth} outside 1..=16"
            )));
        }
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(Error::domain(format!(
                "frame rate {frame_rate} must be positive"
            )));
        }
        if let Some(first) = frames.first() {
            if frames.iter().any(|f| f.dims() != first.dims()) {
                return Err(Error::domain("all frames must share one size"));
            }
        }
        let top = (1u32 << bit_depth) - 1;
        if frames
            .iter()
            .flat_map(|f| f.samples())
            .any(|&s| s as u32 > top)
        {
            return Err(Error::domain(format!(
                "sample exceeds {bit_depth}-bit range"
            )));
        }
        Ok(Self {
            frames,
            bit_depth,
            frame_rate,
        })
    }

    pub fn frames(&self) -> &[SampleFrame] {
        &self.frames
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    fn map_samples(&self, bit_depth: u8, f: impl Fn(u16) -> u16) -> Self {
        let frames = self
            .frames
            .iter()
            .map(|fr| {
                let samples = fr.samples().iter().map(|&s| f(s)).collect();
                SampleFrame::new(fr.height(), fr.width(), samples).expect("same dims")
            })
            .collect();
        Self {
            frames,
            bit_depth,
            frame_rate: self.frame_rate,
        }
    }
}

/// Drops the `shift` least significant bits of every sample.
pub fn bitdepth_truncate(s: &PixelSequence, shift: u8) -> Result<PixelSequence> {
    if shift >= s.bit_depth {
        return Err(Error::domain(format!(
            "shift {shift} must be below the bit depth {}",
            s.bit_depth
        )));
    }
    Ok(s.map_samples(s.bit_depth - shift, |q| q >> shift))
}

/// Scales samples back up by `shift` bits.
pub fn bitdepth_restore(s: &PixelSequence, shift: u8) -> Result<PixelSequence> {
    let depth = s.bit_depth as u32 + shift as u32;
    if depth > MAX_PIXEL_BIT_DEPTH as u32 {
        return Err(Error::domain(format!(
            "restoring {} bits by {shift} exceeds 16 bits",
            s.bit_depth
        )));
    }
    Ok(s.map_samples(depth as u8, |q| q << shift))
}

/// What the decoder needs to undo temporal resampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemporalSideInfo {
    pub ratio: u8,
    pub original_count: u32,
}

impl TemporalSideInfo {
    pub const ENCODED_LEN: usize = 5;

    pub fn to_bytes(&self) -> [u8; Self::ENCODED_LEN] {
        let mut out = [0u8; Self::ENCODED_LEN];
        out[0] = self.ratio;
        out[1..].copy_from_slice(&self.original_count.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let mut r = ByteReader::new(bytes);
        let ratio = r.u8("temporal ratio")?;
        let original_count = r.u32("original frame count")?;
        if r.remaining() != 0 {
            return Err(FormatError::TrailingBytes(r.remaining()));
        }
        Ok(Self {
            ratio,
            original_count,
        })
    }

    /// Frames kept by resampling `original_count` frames at `ratio`.
    pub fn kept_count(&self) -> usize {
        (self.original_count as usize).div_ceil(self.ratio.max(1) as usize)
    }
}

fn check_ratio(ratio: u8) -> Result<()> {
    if ![2, 4, 8].contains(&ratio) {
        return Err(Error::domain(format!(
            "temporal ratio {ratio} not in {{2, 4, 8}}"
        )));
    }
    Ok(())
}

/// Keeps frames `0, ratio, 2·ratio, …`.
pub fn temporal_resample_scalar(
    s: &PixelSequence,
    ratio: u8,
) -> Result<(PixelSequence, TemporalSideInfo)> {
    check_ratio(ratio)?;
    if s.is_empty() {
        return Err(Error::domain("cannot resample an empty sequence"));
    }
    let original_count = u32::try_from(s.len()).map_err(|_| Error::domain("sequence too long"))?;
    let kept = PixelSequence {
        frames: s.frames.iter().step_by(ratio as usize).cloned().collect(),
        bit_depth: s.bit_depth,
        frame_rate: s.frame_rate / ratio as f64,
    };
    Ok((
        kept,
        TemporalSideInfo {
            ratio,
            original_count,
        },
    ))
}

/// Re-creates dropped frames by sample-wise linear interpolation between the
/// surrounding kept frames; frames after the last kept one repeat it.
pub fn temporal_restore(s: &PixelSequence, side: &TemporalSideInfo) -> Result<PixelSequence> {
    check_ratio(side.ratio)?;
    if side.original_count == 0 || s.len() != side.kept_count() {
        return Err(Error::domain(format!(
            "{} kept frames inconsistent with ratio {} over {} frames",
            s.len(),
            side.ratio,
            side.original_count
        )));
    }
    let r = side.ratio as usize;
    let mut frames = Vec::with_capacity(side.original_count as usize);
    for i in 0..side.original_count as usize {
        let left = i / r;
        let offset = i % r;
        let a = &s.frames[left];
        match s.frames.get(left + 1) {
            Some(b) if offset != 0 => {
                let t = offset as f64 / r as f64;
                let samples = a
                    .samples()
                    .iter()
                    .zip(b.samples())
                    .map(|(&x, &y)| (x as f64 + (y as f64 - x as f64) * t).round() as u16)
                    .collect();
                frames.push(SampleFrame::new(a.height(), a.width(), samples)?);
            }
            _ => frames.push(a.clone()),
        }
    }
    Ok(PixelSequence {
        frames,
        bit_depth: s.bit_depth,
        frame_rate: s.frame_rate * r as f64,
    })
}
