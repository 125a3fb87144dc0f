//! Bit and soft-value containers shared by every stage of the link.

use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// Magnitude bound applied to every LLR entering or produced by the decoder.
pub const LLR_CLAMP: f64 = 40.0;

/// An ordered sequence of binary symbols (message, codeword or frame).
///
/// Each element is stored as a `u8` holding 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitBlock(Vec<u8>);

impl BitBlock {
    /// Wraps `bits`, rejecting anything other than 0 or 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::Parameter(format!(
                "bit {pos} has value {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(Self(bits))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Self(bits.into_iter().map(u8::from).collect())
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    /// Packed hex text, four bits per digit, index 0 in the most significant
    /// position. A trailing partial nibble is zero padded.
    pub fn to_hex(&self) -> String {
        self.0
            .chunks(4)
            .map(|chunk| {
                let nibble = chunk
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (i, &b)| acc | (u32::from(b) << (3 - i)));
                char::from_digit(nibble, 16).expect("nibble < 16")
            })
            .collect()
    }

    /// Inverse of [`BitBlock::to_hex`]; `len` is the number of bits encoded.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let hex = hex.trim();
        let digits = len.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::Parse(format!(
                "{len} bits need {digits} hex digits, got {}",
                hex.len()
            )));
        }
        let mut bits = Vec::with_capacity(digits * 4);
        for c in hex.chars() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
            bits.extend((0..4).rev().map(|shift| ((nibble >> shift) & 1) as u8));
        }
        if bits[len..].iter().any(|&b| b != 0) {
            return Err(Error::Parse("nonzero padding bits".into()));
        }
        bits.truncate(len);
        Ok(Self(bits))
    }

    /// Positionwise XOR of two equal-length blocks.
    pub fn xor(&self, other: &BitBlock) -> Result<BitBlock> {
        crate::error::check_len("xor operand", self.len(), other.len())?;
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    /// Number of positions where the two blocks differ.
    pub fn hamming_distance(&self, other: &BitBlock) -> Result<usize> {
        crate::error::check_len("compared block", self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count())
    }
}

impl Deref for BitBlock {
    type Target = [u8];

    fn deref(&self) -> &[u8] {
        &self.0
    }
}

impl TryFrom<Vec<u8>> for BitBlock {
    type Error = Error;

    fn try_from(bits: Vec<u8>) -> Result<Self> {
        Self::new(bits)
    }
}

impl fmt::Display for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Per-symbol log-likelihood ratios, `ln P(0)/P(1)`; positive favours bit 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LlrBlock(Vec<f64>);

impl LlrBlock {
    /// Rejects non-finite entries and clamps the rest to `±LLR_CLAMP`.
    pub fn new(mut llrs: Vec<f64>) -> Result<Self> {
        if let Some(pos) = llrs.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "llr {pos} is not finite ({})",
                llrs[pos]
            )));
        }
        for v in &mut llrs {
            *v = v.clamp(-LLR_CLAMP, LLR_CLAMP);
        }
        Ok(Self(llrs))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for LlrBlock {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Hard decision on a single LLR. Zero resolves to bit 0.
#[inline]
pub fn hard_decision(llr: f64) -> u8 {
    u8::from(llr < 0.0)
}
