//! `FCMB` stream container.
//!
//! ```text
//! stream := "FCMB" | version u8 = 1 | unit_count u16 (>= 1) | unit*
//! unit   := label_len u8 | label utf-8
//!           | N u16 | k u16 | rank_len u16 | rank (big-endian, minimal)
//!           | mu f32 | sigma f32                  statistics of the input tensor
//!           | mu_x f32 | sigma_x f32              statistics of the reduced tensor
//!           | bit_depth u8 | min f32 | max f32     conversion range
//!           | grid_rows u16 | grid_cols u16 | tile_h u16 | tile_w u16
//!           | channel_count u16 | perm_len u16 | perm u16*
//!           | transform u8 | tensor_h u16 | tensor_w u16
//!           | codec u8 | qp u8 | payload_len u32 | payload
//! ```
//! Every multi-byte field is little-endian except the rank. A rank of zero is
//! written with length 0; any other rank has no leading zero byte.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::bytes::ByteReader;
use crate::codec::{CodecId, MAX_QP};
use crate::conversion::{ConversionParams, MAX_BIT_DEPTH, MIN_BIT_DEPTH};
use crate::error::FormatError;
use crate::lcr::{subset_count, LcrCode};
use crate::packing::PackingLayout;
use crate::tensor::GlobalStats;
use crate::transform::TransformId;

pub const STREAM_MAGIC: [u8; 4] = *b"FCMB";
pub const STREAM_VERSION: u8 = 1;

/// Upper bound on the samples of any frame or tensor a unit may describe.
pub const MAX_UNIT_SAMPLES: usize = 1 << 30;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitHeader {
    pub label: String,
    pub original_channels: usize,
    pub lcr: LcrCode,
    pub transform_stats: GlobalStats,
    pub reduced_stats: GlobalStats,
    pub conversion: ConversionParams,
    pub layout: PackingLayout,
    pub transform: TransformId,
    pub tensor_height: usize,
    pub tensor_width: usize,
    pub codec: CodecId,
    pub qp: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BitstreamUnit {
    pub header: UnitHeader,
    pub payload: Vec<u8>,
}

fn invariant(msg: impl Into<String>) -> FormatError {
    FormatError::Invariant(msg.into())
}

fn u16_field(v: usize, what: &str) -> Result<u16, FormatError> {
    u16::try_from(v).map_err(|_| invariant(format!("{what} {v} does not fit in u16")))
}

fn rank_bytes(rank: &BigUint) -> Vec<u8> {
    if rank.is_zero() {
        Vec::new()
    } else {
        rank.to_bytes_be()
    }
}

/// `rank < C(n, k)`, answered without the full binomial when bit lengths
/// already settle it.
fn rank_in_range(rank: &BigUint, n: usize, k: usize) -> bool {
    if rank.is_zero() {
        return true;
    }
    let bits = rank.bits();
    // C(n, k) ≤ 2^n
    if bits > n as u64 {
        return false;
    }
    // C(n, k) ≥ (n / k')^k' with k' = min(k, n − k)
    let kp = k.min(n - k);
    if kp > 0 {
        let lower = kp as f64 * (n as f64 / kp as f64).log2();
        if (bits as f64) < lower.floor() - 1.0 {
            return true;
        }
    }
    *rank < subset_count(n, k)
}

impl UnitHeader {
    pub fn pruned_k(&self) -> usize {
        self.lcr.k
    }

    fn write(&self, out: &mut Vec<u8>, payload_len: usize) -> Result<(), FormatError> {
        let label = self.label.as_bytes();
        if label.len() > u8::MAX as usize {
            return Err(invariant("label longer than 255 bytes"));
        }
        out.push(label.len() as u8);
        out.extend_from_slice(label);
        out.extend(u16_field(self.original_channels, "channel count")?.to_le_bytes());
        out.extend(u16_field(self.lcr.k, "pruned count")?.to_le_bytes());
        let rank = rank_bytes(&self.lcr.rank);
        out.extend(u16_field(rank.len(), "rank length")?.to_le_bytes());
        out.extend_from_slice(&rank);
        for stats in [self.transform_stats, self.reduced_stats] {
            let (mu, sigma) = stats.to_wire();
            out.extend(mu.to_le_bytes());
            out.extend(sigma.to_le_bytes());
        }
        out.push(self.conversion.bit_depth);
        out.extend(self.conversion.min_val.to_le_bytes());
        out.extend(self.conversion.max_val.to_le_bytes());
        let l = &self.layout;
        for (v, what) in [
            (l.grid_rows, "grid rows"),
            (l.grid_cols, "grid cols"),
            (l.tile_h, "tile height"),
            (l.tile_w, "tile width"),
            (l.channel_count, "packed channels"),
            (l.permutation.len(), "permutation length"),
        ] {
            out.extend(u16_field(v, what)?.to_le_bytes());
        }
        for &p in &l.permutation {
            out.extend(u16_field(p, "permutation entry")?.to_le_bytes());
        }
        out.push(self.transform.0);
        out.extend(u16_field(self.tensor_height, "tensor height")?.to_le_bytes());
        out.extend(u16_field(self.tensor_width, "tensor width")?.to_le_bytes());
        out.push(self.codec.0);
        out.push(self.qp);
        let len = u32::try_from(payload_len).map_err(|_| invariant("payload longer than u32"))?;
        out.extend(len.to_le_bytes());
        Ok(())
    }

    fn read(r: &mut ByteReader<'_>) -> Result<Self, FormatError> {
        let label_len = r.u8("label length")? as usize;
        let label = std::str::from_utf8(r.take(label_len, "label")?)
            .map_err(|_| FormatError::InvalidLabel)?
            .to_owned();
        let n = r.u16("channel count")? as usize;
        let k = r.u16("pruned count")? as usize;
        let rank_len = r.u16("rank length")? as usize;
        let raw_rank = r.take(rank_len, "rank")?;
        if raw_rank.first() == Some(&0) {
            return Err(invariant("rank has a leading zero byte"));
        }
        let rank = BigUint::from_bytes_be(raw_rank);
        if n == 0 {
            return Err(invariant("unit has zero channels"));
        }
        if k > n {
            return Err(invariant(format!("pruned count {k} exceeds {n} channels")));
        }
        if !rank_in_range(&rank, n, k) {
            return Err(invariant(format!("rank is not below C({n}, {k})")));
        }
        let mut stats = [GlobalStats {
            mu: 0.0,
            sigma: 0.0,
        }; 2];
        for s in stats.iter_mut() {
            let mu = r.f32("mean")?;
            let sigma = r.f32("standard deviation")?;
            if !mu.is_finite() || !sigma.is_finite() {
                return Err(FormatError::NonFinite("statistics"));
            }
            *s = GlobalStats::new(mu as f64, sigma as f64)
                .map_err(|_| invariant("negative standard deviation"))?;
        }
        let bit_depth = r.u8("bit depth")?;
        if !(MIN_BIT_DEPTH..=MAX_BIT_DEPTH).contains(&bit_depth) {
            return Err(invariant(format!("bit depth {bit_depth}")));
        }
        let min_val = r.f32("conversion min")?;
        let max_val = r.f32("conversion max")?;
        if !min_val.is_finite() || !max_val.is_finite() {
            return Err(FormatError::NonFinite("conversion range"));
        }
        let conversion = ConversionParams::new(bit_depth, min_val, max_val)
            .map_err(|_| invariant("conversion min above max"))?;
        let grid_rows = r.u16("grid rows")? as usize;
        let grid_cols = r.u16("grid cols")? as usize;
        let tile_h = r.u16("tile height")? as usize;
        let tile_w = r.u16("tile width")? as usize;
        let channel_count = r.u16("packed channels")? as usize;
        let perm_len = r.u16("permutation length")? as usize;
        let mut permutation = Vec::with_capacity(perm_len.min(r.remaining() / 2));
        for _ in 0..perm_len {
            permutation.push(r.u16("permutation entry")? as usize);
        }
        let layout = PackingLayout {
            grid_rows,
            grid_cols,
            tile_h,
            tile_w,
            channel_count,
            permutation,
        };
        layout.validate().map_err(|e| invariant(e.to_string()))?;
        if channel_count != n - k {
            return Err(invariant(format!(
                "{channel_count} packed channels, expected {n} - {k}"
            )));
        }
        let (fh, fw) = layout.frame_dims();
        if fh.saturating_mul(fw) > MAX_UNIT_SAMPLES {
            return Err(FormatError::DimensionOverflow(format!("frame {fh}x{fw}")));
        }
        let transform = TransformId(r.u8("transform")?);
        let tensor_height = r.u16("tensor height")? as usize;
        let tensor_width = r.u16("tensor width")? as usize;
        if tensor_height == 0 || tensor_width == 0 {
            return Err(invariant("zero tensor dimension"));
        }
        if n.saturating_mul(tensor_height).saturating_mul(tensor_width) > MAX_UNIT_SAMPLES {
            return Err(FormatError::DimensionOverflow(format!(
                "tensor {n}x{tensor_height}x{tensor_width}"
            )));
        }
        let codec = CodecId(r.u8("codec")?);
        let qp = r.u8("qp")?;
        if qp > MAX_QP {
            return Err(invariant(format!("qp {qp} above {MAX_QP}")));
        }
        Ok(UnitHeader {
            label,
            original_channels: n,
            lcr: LcrCode { k, rank },
            transform_stats: stats[0],
            reduced_stats: stats[1],
            conversion,
            layout,
            transform,
            tensor_height,
            tensor_width,
            codec,
            qp,
        })
    }
}

pub fn serialize_unit(header: &UnitHeader, payload: &[u8]) -> Result<Vec<u8>, FormatError> {
    let mut out = Vec::with_capacity(96 + payload.len());
    header.write(&mut out, payload.len())?;
    out.extend_from_slice(payload);
    Ok(out)
}

/// Parses one unit from the front of `bytes`; returns the header, the
/// payload and the number of bytes consumed.
pub fn parse_unit(bytes: &[u8]) -> Result<(UnitHeader, Vec<u8>, usize), FormatError> {
    let mut r = ByteReader::new(bytes);
    let header = UnitHeader::read(&mut r)?;
    let len = r.u32("payload length")? as usize;
    let payload = r.take(len, "payload")?.to_vec();
    Ok((header, payload, r.position()))
}

pub fn serialize_stream(units: &[BitstreamUnit]) -> Result<Vec<u8>, FormatError> {
    let count = u16::try_from(units.len()).map_err(|_| invariant("more than 65535 units"))?;
    if count == 0 {
        return Err(invariant("stream has no units"));
    }
    let mut out = Vec::new();
    out.extend_from_slice(&STREAM_MAGIC);
    out.push(STREAM_VERSION);
    out.extend(count.to_le_bytes());
    for u in units {
        u.header.write(&mut out, u.payload.len())?;
        out.extend_from_slice(&u.payload);
    }
    Ok(out)
}

/// Validates the stream prelude; returns the unit count and the offset of
/// the first unit.
pub fn parse_stream_header(bytes: &[u8]) -> Result<(usize, usize), FormatError> {
    let mut r = ByteReader::new(bytes);
    r.magic(&STREAM_MAGIC)?;
    let version = r.u8("version")?;
    if version != STREAM_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let count = r.u16("unit count")? as usize;
    if count == 0 {
        return Err(invariant("stream has no units"));
    }
    Ok((count, r.position()))
}

pub fn parse_stream(bytes: &[u8]) -> Result<Vec<BitstreamUnit>, FormatError> {
    let (count, offset) = parse_stream_header(bytes)?;
    let mut rest = &bytes[offset..];
    let mut units = Vec::with_capacity(count.min(64));
    for _ in 0..count {
        let (header, payload, used) = parse_unit(rest)?;
        units.push(BitstreamUnit { header, payload });
        rest = &rest[used..];
    }
    if !rest.is_empty() {
        return Err(FormatError::TrailingBytes(rest.len()));
    }
    Ok(units)
}
