//! `RAW_LOSSLESS`: fixed-width sample packing followed by DEFLATE.
//!
//! Payload: `scheme u8 | compressed bytes`. The only scheme defined is
//! [`SCHEME_DEFLATE`].

use miniz_oxide::deflate::compress_to_vec;
use miniz_oxide::inflate::decompress_to_vec_with_limit;

use super::bits::{BitReader, BitWriter};
use super::{CodecId, InnerCodec};
use crate::error::CodecError;
use crate::frame::SampleFrame;

pub const SCHEME_DEFLATE: u8 = 1;
const DEFLATE_LEVEL: u8 = 6;

#[derive(Debug, Default, Clone, Copy)]
pub struct RawLossless;

fn packed_len(samples: usize, bit_depth: u8) -> Option<usize> {
    samples
        .checked_mul(bit_depth as usize)
        .map(|bits| bits.div_ceil(8))
}

impl InnerCodec for RawLossless {
    fn id(&self) -> CodecId {
        CodecId::RAW_LOSSLESS
    }

    fn name(&self) -> &str {
        "raw"
    }

    fn encode(&self, frame: &SampleFrame, bit_depth: u8, _qp: u8) -> Result<Vec<u8>, CodecError> {
        let mut w = BitWriter::new();
        for &s in frame.samples() {
            w.write_bits(s as u64, bit_depth as u32);
        }
        let mut out = vec![SCHEME_DEFLATE];
        out.extend(compress_to_vec(&w.finish(), DEFLATE_LEVEL));
        Ok(out)
    }

    fn decode(
        &self,
        payload: &[u8],
        height: usize,
        width: usize,
        bit_depth: u8,
        _qp: u8,
    ) -> Result<SampleFrame, CodecError> {
        let (&scheme, body) = payload
            .split_first()
            .ok_or(CodecError::Truncated("lossless scheme byte"))?;
        if scheme != SCHEME_DEFLATE {
            return Err(CodecError::Corrupt(format!(
                "unknown lossless scheme {scheme}"
            )));
        }
        let count = height
            .checked_mul(width)
            .ok_or_else(|| CodecError::Corrupt("frame dimensions overflow".into()))?;
        let expected = packed_len(count, bit_depth)
            .ok_or_else(|| CodecError::Corrupt("frame dimensions overflow".into()))?;
        let packed = decompress_to_vec_with_limit(body, expected)
            .map_err(|e| CodecError::Corrupt(format!("inflate failed: {:?}", e.status)))?;
        if packed.len() != expected {
            return Err(CodecError::Corrupt(format!(
                "inflated {} bytes, expected {expected}",
                packed.len()
            )));
        }
        let mut r = BitReader::new(&packed);
        let mut samples = Vec::with_capacity(count);
        for _ in 0..count {
            samples.push(r.read_bits(bit_depth as u32)? as u16);
        }
        SampleFrame::new(height, width, samples).map_err(|e| CodecError::Corrupt(e.to_string()))
    }
}
