//! Linear min/max mapping between real frames and n-bit unsigned frames.

use crate::error::{Error, Result};
use crate::frame::{RealFrame, SampleFrame};

pub const MIN_BIT_DEPTH: u8 = 8;
pub const MAX_BIT_DEPTH: u8 = 16;
pub const DEFAULT_BIT_DEPTH: u8 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConversionParams {
    pub bit_depth: u8,
    pub min_val: f32,
    pub max_val: f32,
}

impl ConversionParams {
    pub fn new(bit_depth: u8, min_val: f32, max_val: f32) -> Result<Self> {
        check_bit_depth(bit_depth)?;
        if !min_val.is_finite() || !max_val.is_finite() || min_val > max_val {
            return Err(Error::domain(format!(
                "invalid conversion range [{min_val}, {max_val}]"
            )));
        }
        Ok(Self {
            bit_depth,
            min_val,
            max_val,
        })
    }

    pub fn levels(&self) -> u32 {
        max_level(self.bit_depth)
    }

    /// Half of one quantization step in the real domain.
    pub fn half_step(&self) -> f64 {
        (self.max_val as f64 - self.min_val as f64) / (2.0 * self.levels() as f64)
    }
}

pub(crate) fn check_bit_depth(bit_depth: u8) -> Result<()> {
    if !(MIN_BIT_DEPTH..=MAX_BIT_DEPTH).contains(&bit_depth) {
        return Err(Error::domain(format!(
            "bit depth {bit_depth} outside {MIN_BIT_DEPTH}..={MAX_BIT_DEPTH}"
        )));
    }
    Ok(())
}

/// `2^n − 1`.
pub fn max_level(bit_depth: u8) -> u32 {
    (1u32 << bit_depth) - 1
}

/// Maps the frame's `[min, max]` onto `[0, 2^n − 1]`, rounding half away
/// from zero.
pub fn quantize_frame(f: &RealFrame, bit_depth: u8) -> Result<(SampleFrame, ConversionParams)> {
    check_bit_depth(bit_depth)?;
    let (min_val, max_val) = f
        .samples()
        .iter()
        .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if f.samples().is_empty() {
        return Err(Error::domain("cannot quantize an empty frame"));
    }
    let params = ConversionParams::new(bit_depth, min_val, max_val)?;
    let levels = params.levels() as f64;
    let range = max_val as f64 - min_val as f64;
    let samples = if range == 0.0 {
        vec![0u16; f.samples().len()]
    } else {
        f.samples()
            .iter()
            .map(|&v| {
                let q = ((v as f64 - min_val as f64) / range * levels).round();
                q.clamp(0.0, levels) as u16
            })
            .collect()
    };
    Ok((SampleFrame::new(f.height(), f.width(), samples)?, params))
}

pub fn dequantize_frame(f: &SampleFrame, p: &ConversionParams) -> Result<RealFrame> {
    let levels = p.levels();
    if let Some(&q) = f.samples().iter().find(|&&q| q as u32 > levels) {
        return Err(Error::domain(format!(
            "sample {q} exceeds {}-bit range",
            p.bit_depth
        )));
    }
    let min = p.min_val as f64;
    let range = p.max_val as f64 - min;
    let samples = f
        .samples()
        .iter()
        .map(|&q| {
            if range == 0.0 {
                p.min_val
            } else {
                (min + q as f64 / levels as f64 * range) as f32
            }
        })
        .collect();
    RealFrame::new(f.height(), f.width(), samples)
}
