//! `BLOCK_DCT`: lossy intra codec.
//!
//! The frame is padded to a multiple of 8 by edge replication and level
//! shifted by `2^(n−1)`. Every 8×8 block is transformed with an orthonormal
//! DCT, quantized with a uniform step `qstep(qp) = 2^((qp − 4)/6)` and scanned
//! in zigzag order. Per block the bitstream holds `ue(pairs)` followed by
//! `pairs × (ue(run), ue(level code))`, where `run` counts zero coefficients
//! preceding each non-zero level. Blocks are raster ordered; the final byte is
//! zero padded.

use super::bits::{
    code_to_level, level_to_code, read_exp_golomb, write_exp_golomb, BitReader, BitWriter,
};
use super::dct::{dct_block_forward, dct_block_inverse, zigzag, Block, N};
use super::{CodecId, InnerCodec};
use crate::conversion::max_level;
use crate::error::CodecError;
use crate::frame::SampleFrame;

pub const MAX_QP: u8 = 63;

/// Quantizer step for `qp`; doubles every 6 steps with `qstep(4) = 1`.
pub fn qstep(qp: u8) -> f64 {
    2f64.powf((qp as f64 - 4.0) / 6.0)
}

#[derive(Debug, Default, Clone, Copy)]
pub struct BlockDct;

fn round_half_away(v: f64) -> f64 {
    v.round()
}

impl InnerCodec for BlockDct {
    fn id(&self) -> CodecId {
        CodecId::BLOCK_DCT
    }

    fn name(&self) -> &str {
        "dct"
    }

    fn encode(&self, frame: &SampleFrame, bit_depth: u8, qp: u8) -> Result<Vec<u8>, CodecError> {
        if qp > MAX_QP {
            return Err(CodecError::Corrupt(format!("qp {qp} above {MAX_QP}")));
        }
        let (h, w) = frame.dims();
        let shift = (1u32 << (bit_depth - 1)) as f64;
        let step = qstep(qp);
        let mut out = BitWriter::new();
        for by in (0..h).step_by(N) {
            for bx in (0..w).step_by(N) {
                let mut block: Block = [[0.0; N]; N];
                for (y, row) in block.iter_mut().enumerate() {
                    let sy = (by + y).min(h - 1);
                    for (x, v) in row.iter_mut().enumerate() {
                        let sx = (bx + x).min(w - 1);
                        *v = frame.get(sy, sx) as f64 - shift;
                    }
                }
                let coeffs = dct_block_forward(&block);
                let mut pairs = Vec::new();
                let mut run = 0u64;
                for &(u, v) in zigzag() {
                    let level = round_half_away(coeffs[u][v] / step) as i64;
                    if level == 0 {
                        run += 1;
                    } else {
                        pairs.push((run, level));
                        run = 0;
                    }
                }
                write_exp_golomb(&mut out, pairs.len() as u64);
                for (run, level) in pairs {
                    write_exp_golomb(&mut out, run);
                    write_exp_golomb(&mut out, level_to_code(level));
                }
            }
        }
        Ok(out.finish())
    }

    fn decode(
        &self,
        payload: &[u8],
        height: usize,
        width: usize,
        bit_depth: u8,
        qp: u8,
    ) -> Result<SampleFrame, CodecError> {
        if qp > MAX_QP {
            return Err(CodecError::Corrupt(format!("qp {qp} above {MAX_QP}")));
        }
        if height == 0 || width == 0 {
            return Err(CodecError::Corrupt("empty frame".into()));
        }
        let blocks = height
            .div_ceil(N)
            .checked_mul(width.div_ceil(N))
            .ok_or_else(|| CodecError::Corrupt("frame dimensions overflow".into()))?;
        // each block costs at least one bit
        if blocks > payload.len().saturating_mul(8) {
            return Err(CodecError::Truncated("block data"));
        }
        let count = height
            .checked_mul(width)
            .ok_or_else(|| CodecError::Corrupt("frame dimensions overflow".into()))?;
        let shift = (1u32 << (bit_depth - 1)) as f64;
        let top = max_level(bit_depth) as f64;
        let step = qstep(qp);
        let order = zigzag();
        let mut samples = vec![0u16; count];
        let mut r = BitReader::new(payload);
        for by in (0..height).step_by(N) {
            for bx in (0..width).step_by(N) {
                let pairs = read_exp_golomb(&mut r)?;
                if pairs > (N * N) as u64 {
                    return Err(CodecError::Corrupt(format!(
                        "{pairs} coefficient pairs in a block"
                    )));
                }
                let mut coeffs: Block = [[0.0; N]; N];
                let mut pos = 0u64;
                for _ in 0..pairs {
                    pos += read_exp_golomb(&mut r)?;
                    let level = code_to_level(read_exp_golomb(&mut r)?);
                    if pos >= (N * N) as u64 {
                        return Err(CodecError::Corrupt(
                            "coefficient run past end of block".into(),
                        ));
                    }
                    let (u, v) = order[pos as usize];
                    coeffs[u][v] = level as f64 * step;
                    pos += 1;
                }
                let block = dct_block_inverse(&coeffs);
                for (y, row) in block.iter().enumerate().take(height - by) {
                    for (x, &v) in row.iter().enumerate().take(width - bx) {
                        let s = round_half_away(v + shift).clamp(0.0, top);
                        samples[(by + y) * width + bx + x] = s as u16;
                    }
                }
            }
        }
        if r.bits_left() >= 8 {
            return Err(CodecError::Corrupt(format!(
                "{} unused bytes after the last block",
                r.bits_left() / 8
            )));
        }
        SampleFrame::new(height, width, samples).map_err(|e| CodecError::Corrupt(e.to_string()))
    }
}
