//! Bit blocks and the natural (MSB-first) mapping between bit fields and integers.

use crate::error::{Error, Result};

/// An ordered block of information bits, each stored as `0` or `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitBlock(Vec<u8>);

impl BitBlock {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Contract(format!("bit value {b} is not 0 or 1")));
        }
        Ok(Self(bits))
    }

    /// The `len` low-order bits of `value`, most significant first.
    pub fn from_value(value: u64, len: usize) -> Self {
        Self(value_to_bits(value, len))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    /// The block read as an unsigned integer, first bit most significant.
    pub fn value(&self) -> u64 {
        bits_to_value(&self.0)
    }
}

impl AsRef<[u8]> for BitBlock {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

pub fn bits_to_value(bits: &[u8]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b & 1))
}

pub fn value_to_bits(value: u64, len: usize) -> Vec<u8> {
    (0..len).rev().map(|i| ((value >> i) & 1) as u8).collect()
}

/// Natural mapping of an `M`-bit field to a 1-based channel-state index.
///
/// `{0,0} -> 1`, `{0,1} -> 2`, `{1,0} -> 3`, `{1,1} -> 4`.
pub fn bits_to_state_index(bits: &[u8], mirrors: u32) -> Result<usize> {
    if bits.len() != mirrors as usize {
        return Err(Error::Contract(format!(
            "state field has {} bits, expected {mirrors}",
            bits.len()
        )));
    }
    Ok(1 + bits_to_value(bits) as usize)
}

/// Extracts `width` bits starting `offset` bits below the top of a `total`-bit block.
#[inline]
pub(crate) fn field(block: u64, total: u32, offset: u32, width: u32) -> u64 {
    if width == 0 {
        return 0;
    }
    (block >> (total - offset - width)) & ((1u64 << width) - 1)
}

#[inline]
pub fn hamming(a: u64, b: u64) -> u32 {
    (a ^ b).count_ones()
}
