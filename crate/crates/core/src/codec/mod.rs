//! Pluggable 2D-frame codecs.
//!
//! Two codecs are built in: [`RawLossless`] (id 0) and [`BlockDct`] (id 1).
//! Ids 2–255 are reserved for adapters registered at runtime, such as
//! [`ExternalCodec`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub mod bits;
pub mod block;
pub mod dct;
pub mod external;
pub mod lossless;
pub mod raw_frame;

pub use block::{qstep, BlockDct, MAX_QP};
pub use external::ExternalCodec;
pub use lossless::RawLossless;

use crate::conversion::{check_bit_depth, max_level};
use crate::error::{CodecError, Error, Result};
use crate::frame::SampleFrame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CodecId(pub u8);

impl CodecId {
    pub const RAW_LOSSLESS: CodecId = CodecId(0);
    pub const BLOCK_DCT: CodecId = CodecId(1);

    pub fn is_builtin(self) -> bool {
        self.0 <= 1
    }
}

impl fmt::Display for CodecId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CodecId::RAW_LOSSLESS => f.write_str("raw"),
            CodecId::BLOCK_DCT => f.write_str("dct"),
            CodecId(n) => write!(f, "external-{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedPayload {
    pub codec: CodecId,
    pub qp: u8,
    pub bytes: Vec<u8>,
}

/// A codec for single integer-valued frames.
///
/// `decode` must either return a frame of exactly `height × width` samples
/// within the bit depth, or an error. It must not panic on arbitrary input.
pub trait InnerCodec: Send + Sync {
    fn id(&self) -> CodecId;
    fn name(&self) -> &str;
    fn encode(&self, frame: &SampleFrame, bit_depth: u8, qp: u8) -> Result<Vec<u8>, CodecError>;
    fn decode(
        &self,
        payload: &[u8],
        height: usize,
        width: usize,
        bit_depth: u8,
        qp: u8,
    ) -> Result<SampleFrame, CodecError>;
}

#[derive(Clone)]
pub struct CodecRegistry {
    codecs: BTreeMap<CodecId, Arc<dyn InnerCodec>>,
}

impl Default for CodecRegistry {
    fn default() -> Self {
        let mut codecs: BTreeMap<CodecId, Arc<dyn InnerCodec>> = BTreeMap::new();
        codecs.insert(CodecId::RAW_LOSSLESS, Arc::new(RawLossless));
        codecs.insert(CodecId::BLOCK_DCT, Arc::new(BlockDct));
        Self { codecs }
    }
}

impl fmt::Debug for CodecRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(
                self.codecs
                    .iter()
                    .map(|(id, c)| (id.0, c.name().to_owned())),
            )
            .finish()
    }
}

impl CodecRegistry {
    /// Adds a codec; every id can be registered once.
    pub fn register(&mut self, codec: Arc<dyn InnerCodec>) -> Result<()> {
        let id = codec.id();
        if self.codecs.contains_key(&id) {
            return Err(Error::config(format!(
                "codec id {} already registered",
                id.0
            )));
        }
        self.codecs.insert(id, codec);
        Ok(())
    }

    pub fn get(&self, id: CodecId) -> Result<&Arc<dyn InnerCodec>, CodecError> {
        self.codecs.get(&id).ok_or(CodecError::UnknownCodec(id.0))
    }

    pub fn encode(
        &self,
        frame: &SampleFrame,
        codec: CodecId,
        bit_depth: u8,
        qp: u8,
    ) -> Result<EncodedPayload> {
        check_bit_depth(bit_depth)?;
        if qp > MAX_QP {
            return Err(Error::config(format!("qp {qp} above {MAX_QP}")));
        }
        let top = max_level(bit_depth);
        if let Some(&s) = frame.samples().iter().find(|&&s| s as u32 > top) {
            return Err(CodecError::SampleRange {
                value: s as u32,
                bit_depth,
            }
            .into());
        }
        let bytes = self.get(codec)?.encode(frame, bit_depth, qp)?;
        Ok(EncodedPayload { codec, qp, bytes })
    }

    pub fn decode(
        &self,
        payload: &EncodedPayload,
        dims: (usize, usize),
        bit_depth: u8,
    ) -> Result<SampleFrame> {
        check_bit_depth(bit_depth)?;
        let codec = self.get(payload.codec)?;
        let frame = codec.decode(&payload.bytes, dims.0, dims.1, bit_depth, payload.qp)?;
        if frame.dims() != dims {
            return Err(CodecError::Corrupt(format!(
                "codec produced {:?}, expected {dims:?}",
                frame.dims()
            ))
            .into());
        }
        let top = max_level(bit_depth);
        if let Some(&s) = frame.samples().iter().find(|&&s| s as u32 > top) {
            return Err(CodecError::SampleRange {
                value: s as u32,
                bit_depth,
            }
            .into());
        }
        Ok(frame)
    }
}

/// Encodes with the built-in codecs.
pub fn codec_encode(
    frame: &SampleFrame,
    codec: CodecId,
    bit_depth: u8,
    qp: u8,
) -> Result<EncodedPayload> {
    CodecRegistry::default().encode(frame, codec, bit_depth, qp)
}

/// Decodes with the built-in codecs.
pub fn codec_decode(
    payload: &EncodedPayload,
    dims: (usize, usize),
    bit_depth: u8,
) -> Result<SampleFrame> {
    CodecRegistry::default().decode(payload, dims, bit_depth)
}
