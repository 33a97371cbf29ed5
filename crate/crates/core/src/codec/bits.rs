//! MSB-first bit I/O and order-0 exponential-Golomb codes.

use crate::error::CodecError;

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    acc: u8,
    used: u8,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn write_bit(&mut self, bit: bool) {
        self.acc = (self.acc << 1) | bit as u8;
        self.used += 1;
        if self.used == 8 {
            self.bytes.push(self.acc);
            self.acc = 0;
            self.used = 0;
        }
    }

    /// Writes the low `count` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u64, count: u32) {
        for i in (0..count).rev() {
            self.write_bit((value >> i) & 1 == 1);
        }
    }

    pub fn bit_len(&self) -> usize {
        self.bytes.len() * 8 + self.used as usize
    }

    /// Flushes a partial byte, padding with zero bits.
    pub fn finish(mut self) -> Vec<u8> {
        if self.used > 0 {
            self.bytes.push(self.acc << (8 - self.used));
        }
        self.bytes
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub fn bit_position(&self) -> usize {
        self.pos
    }

    pub fn bits_left(&self) -> usize {
        self.bytes.len() * 8 - self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool, CodecError> {
        let byte = *self
            .bytes
            .get(self.pos / 8)
            .ok_or(CodecError::Truncated("bit"))?;
        let bit = (byte >> (7 - self.pos % 8)) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, count: u32) -> Result<u64, CodecError> {
        if count as usize > self.bits_left() {
            return Err(CodecError::Truncated("bit field"));
        }
        let mut v = 0u64;
        for _ in 0..count {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }
}

/// Longest prefix accepted by [`read_exp_golomb`]; bounds decoded values to
/// below `2^33`.
const MAX_PREFIX: u32 = 32;

pub fn write_exp_golomb(w: &mut BitWriter, value: u64) {
    assert!(value < u64::MAX, "exp-Golomb value out of range");
    let v = value + 1;
    let len = 64 - v.leading_zeros();
    w.write_bits(0, len - 1);
    w.write_bits(v, len);
}

pub fn read_exp_golomb(r: &mut BitReader<'_>) -> Result<u64, CodecError> {
    let mut zeros = 0;
    while !r.read_bit()? {
        zeros += 1;
        if zeros > MAX_PREFIX {
            return Err(CodecError::Corrupt("exp-Golomb prefix too long".into()));
        }
    }
    let tail = r.read_bits(zeros)?;
    Ok(((1u64 << zeros) | tail) - 1)
}

/// Maps a non-zero level onto `0, 1, 2, …` as `1, −1, 2, −2, …`.
pub fn level_to_code(level: i64) -> u64 {
    debug_assert!(level != 0);
    if level > 0 {
        2 * (level as u64 - 1)
    } else {
        2 * level.unsigned_abs() - 1
    }
}

pub fn code_to_level(code: u64) -> i64 {
    if code.is_multiple_of(2) {
        (code / 2) as i64 + 1
    } else {
        -(code.div_ceil(2) as i64)
    }
}
