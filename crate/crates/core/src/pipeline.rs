//! Encoder and decoder orchestration.
//!
//! Encoder, per tensor `X`:
//! global stats of `X` → transform → channel scoring/pruning → global stats
//! of the reduced tensor → packing → n-bit conversion → inner codec → unit.
//!
//! Decoder, per unit: inner codec → inverse conversion → unpacking →
//! refinement toward the reduced-tensor stats → channel restoration →
//! inverse transform → refinement toward the input stats.
//!
//! Units are independent and processed in parallel; output order always
//! follows input order.

use rayon::prelude::*;

use crate::bitstream::{
    parse_stream_header, parse_unit, serialize_stream, BitstreamUnit, UnitHeader,
};
use crate::channel::{
    prune_channels, restore_channels, score_channels, select_pruned, PruneDecision,
};
use crate::codec::{CodecId, CodecRegistry, EncodedPayload, MAX_QP};
use crate::conversion::{check_bit_depth, dequantize_frame, quantize_frame, DEFAULT_BIT_DEPTH};
use crate::error::{Error, FormatError, Result};
use crate::lcr::{lcr_decode, lcr_encode};
use crate::packing::{pack, unpack};
use crate::tensor::{apply_refinement, compute_global_stats, FeatureTensor, TensorGroup};
use crate::transform::{TransformId, TransformRegistry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncoderConfig {
    /// Fraction of channels to prune, in `[0, 1)`.
    pub prune_ratio: f64,
    pub bit_depth: u8,
    pub codec: CodecId,
    pub qp: u8,
    pub transform: TransformId,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            prune_ratio: 0.0,
            bit_depth: DEFAULT_BIT_DEPTH,
            codec: CodecId::RAW_LOSSLESS,
            qp: 22,
            transform: TransformId::IDENTITY,
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.prune_ratio) {
            return Err(Error::config(format!(
                "prune ratio {} outside [0, 1)",
                self.prune_ratio
            )));
        }
        check_bit_depth(self.bit_depth).map_err(|e| Error::config(e.to_string()))?;
        if self.qp > MAX_QP {
            return Err(Error::config(format!("qp {} above {MAX_QP}", self.qp)));
        }
        Ok(())
    }
}

/// Codecs and transforms available to the encoder and decoder.
#[derive(Debug, Clone, Default)]
pub struct Toolset {
    pub codecs: CodecRegistry,
    pub transforms: TransformRegistry,
}

/// Intermediate and final tensors of one decoded unit.
#[derive(Debug, Clone)]
pub struct DecodedUnit {
    pub header: UnitHeader,
    pub payload_len: usize,
    /// Reduced tensor straight out of inverse conversion and unpacking.
    pub reduced_unrefined: FeatureTensor,
    /// Reduced tensor after refinement toward the transmitted reduced stats.
    pub reduced_refined: FeatureTensor,
    /// Final reconstruction.
    pub output: FeatureTensor,
}

pub fn encode_unit(
    label: &str,
    t: &FeatureTensor,
    cfg: &EncoderConfig,
    tools: &Toolset,
) -> Result<BitstreamUnit> {
    let (c, h, w) = t.shape();
    if c > u16::MAX as usize || h > u16::MAX as usize || w > u16::MAX as usize {
        return Err(Error::config(format!(
            "tensor {c}x{h}x{w} exceeds the 65535 per-dimension limit"
        )));
    }
    let transform = tools
        .transforms
        .get(cfg.transform)
        .map_err(|e| Error::config(e.to_string()))?;
    let transform_stats = compute_global_stats(t).rounded_to_wire();

    let transformed = transform.forward(t)?;
    if transformed.channels() > u16::MAX as usize
        || transformed.height() > u16::MAX as usize
        || transformed.width() > u16::MAX as usize
    {
        return Err(Error::domain(
            "transform output exceeds the 65535 per-dimension limit",
        ));
    }
    let decision = select_pruned(&score_channels(&transformed), cfg.prune_ratio)?;
    let reduced = prune_channels(&transformed, &decision)?;
    let reduced_stats = compute_global_stats(&reduced).rounded_to_wire();

    let (frame, layout) = pack(&reduced);
    let (samples, conversion) = quantize_frame(&frame, cfg.bit_depth)?;
    let EncodedPayload { codec, qp, bytes } =
        tools
            .codecs
            .encode(&samples, cfg.codec, cfg.bit_depth, cfg.qp)?;

    let header = UnitHeader {
        label: label.to_owned(),
        original_channels: transformed.channels(),
        lcr: lcr_encode(decision.pruned()),
        transform_stats,
        reduced_stats,
        conversion,
        layout,
        transform: cfg.transform,
        tensor_height: h,
        tensor_width: w,
        codec,
        qp,
    };
    Ok(BitstreamUnit {
        header,
        payload: bytes,
    })
}

pub fn decode_unit(unit: &BitstreamUnit, tools: &Toolset) -> Result<DecodedUnit> {
    let h = &unit.header;
    let transform = tools.transforms.get(h.transform)?;
    if transform.reduced_dims(h.tensor_height, h.tensor_width) != (h.layout.tile_h, h.layout.tile_w)
    {
        return Err(FormatError::Invariant(format!(
            "tiles of {}x{} do not match transform {} of a {}x{} tensor",
            h.layout.tile_h, h.layout.tile_w, h.transform, h.tensor_height, h.tensor_width
        ))
        .into());
    }
    let payload = EncodedPayload {
        codec: h.codec,
        qp: h.qp,
        bytes: unit.payload.clone(),
    };
    let samples = tools
        .codecs
        .decode(&payload, h.layout.frame_dims(), h.conversion.bit_depth)?;
    let frame = dequantize_frame(&samples, &h.conversion)?;
    let reduced_unrefined = unpack(&frame, &h.layout)?;
    let reduced_refined = apply_refinement(&reduced_unrefined, h.reduced_stats);

    let pruned = lcr_decode(&h.lcr, h.original_channels)?;
    let restored = restore_channels(&reduced_refined, &PruneDecision::new(pruned))?;
    let unrefined = transform.inverse(&restored, h.tensor_height, h.tensor_width)?;
    let output = apply_refinement(&unrefined, h.transform_stats);
    Ok(DecodedUnit {
        header: h.clone(),
        payload_len: unit.payload.len(),
        reduced_unrefined,
        reduced_refined,
        output,
    })
}

pub fn encode_units(
    group: &TensorGroup,
    cfg: &EncoderConfig,
    tools: &Toolset,
) -> Result<Vec<BitstreamUnit>> {
    cfg.validate()?;
    tools
        .codecs
        .get(cfg.codec)
        .map_err(|e| Error::config(e.to_string()))?;
    group
        .entries()
        .par_iter()
        .enumerate()
        .map(|(i, (label, t))| encode_unit(label, t, cfg, tools).map_err(|e| e.in_unit(i)))
        .collect()
}

pub fn fcm_encode_with(
    group: &TensorGroup,
    cfg: &EncoderConfig,
    tools: &Toolset,
) -> Result<Vec<u8>> {
    Ok(serialize_stream(&encode_units(group, cfg, tools)?)?)
}

/// Encodes a tensor group into an `FCMB` stream with the built-in tools.
pub fn fcm_encode(group: &TensorGroup, cfg: &EncoderConfig) -> Result<Vec<u8>> {
    fcm_encode_with(group, cfg, &Toolset::default())
}

/// Parses every unit, attaching the index of the unit that failed.
pub fn parse_units(bytes: &[u8]) -> Result<Vec<BitstreamUnit>> {
    let (count, mut offset) = parse_stream_header(bytes)?;
    let mut units = Vec::with_capacity(count.min(64));
    for i in 0..count {
        let (header, payload, used) =
            parse_unit(&bytes[offset..]).map_err(|e| Error::from(e).in_unit(i))?;
        units.push(BitstreamUnit { header, payload });
        offset += used;
    }
    if offset != bytes.len() {
        return Err(FormatError::TrailingBytes(bytes.len() - offset).into());
    }
    Ok(units)
}

pub fn fcm_decode_detailed(bytes: &[u8], tools: &Toolset) -> Result<Vec<DecodedUnit>> {
    let units = parse_units(bytes)?;
    if units.len() > TensorGroup::MAX_TENSORS {
        return Err(FormatError::Invariant(format!(
            "{} units exceed the {}-tensor group limit",
            units.len(),
            TensorGroup::MAX_TENSORS
        ))
        .into());
    }
    units
        .par_iter()
        .enumerate()
        .map(|(i, u)| decode_unit(u, tools).map_err(|e| e.in_unit(i)))
        .collect()
}

pub fn fcm_decode_with(bytes: &[u8], tools: &Toolset) -> Result<TensorGroup> {
    let decoded = fcm_decode_detailed(bytes, tools)?;
    TensorGroup::new(
        decoded
            .into_iter()
            .map(|d| (d.header.label, d.output))
            .collect(),
    )
}

/// Decodes an `FCMB` stream with the built-in tools.
pub fn fcm_decode(bytes: &[u8]) -> Result<TensorGroup> {
    fcm_decode_with(bytes, &Toolset::default())
}
