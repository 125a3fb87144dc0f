//! Polar encoding with `G_N = B_N F^{⊗n}` and successive-cancellation decoding.
//!
//! `B_N` commutes with `F^{⊗n}`, so the encoder runs the butterfly network on
//! `u` in natural order and bit-reverses the result. The decoder undoes the
//! permutation on the channel LLRs and then walks the natural-order butterfly
//! tree, deciding `u_0, u_1, ...` strictly in index order.

use crate::bits::{hard_decision, BitBlock, LlrBlock, LLR_CLAMP};
use crate::construct::CodeSpec;
use crate::error::{check_len, Error, Result};

/// Bit-reversal of the low `bits` bits of `index`.
#[inline]
pub fn bit_reverse(index: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        index.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Applies the bit-reversal permutation in place.
pub fn bit_reverse_permute<T>(values: &mut [T]) {
    let bits = values.len().trailing_zeros();
    debug_assert!(values.len().is_power_of_two());
    for i in 0..values.len() {
        let j = bit_reverse(i, bits);
        if i < j {
            values.swap(i, j);
        }
    }
}

/// In-place `x = x F^{⊗n}` over GF(2), natural order.
pub fn polar_transform(bits: &mut [u8]) {
    let n = bits.len();
    let mut half = 1;
    while half < n {
        for block in bits.chunks_exact_mut(2 * half) {
            let (upper, lower) = block.split_at_mut(half);
            for (a, b) in upper.iter_mut().zip(lower.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
}

/// Places the message on the information set, zeros elsewhere.
pub fn scatter_message(spec: &CodeSpec, message: &[u8]) -> Result<Vec<u8>> {
    check_len("message", spec.message_len(), message.len())?;
    let mut u = vec![spec.frozen_value(); spec.block_len()];
    for (&pos, &bit) in spec.info_set().iter().zip(message) {
        u[pos] = bit;
    }
    Ok(u)
}

/// Encodes a K-bit message into an N-bit codeword.
pub fn encode(spec: &CodeSpec, message: &BitBlock) -> Result<BitBlock> {
    let mut x = scatter_message(spec, message)?;
    polar_transform(&mut x);
    bit_reverse_permute(&mut x);
    Ok(BitBlock::new(x).expect("xor of bits stays binary"))
}

/// Decodes channel LLRs back to the K information bits.
pub fn decode(spec: &CodeSpec, channel_llrs: &LlrBlock) -> Result<BitBlock> {
    ScDecoder::new(spec).decode(channel_llrs)
}

/// Check-node update, `2 atanh(tanh(a/2) tanh(b/2))`, in a form that stays
/// finite for large magnitudes.
#[inline]
pub fn f_op(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let core = sign * a.abs().min(b.abs());
    let sum = (-(a + b).abs()).exp();
    let diff = (-(a - b).abs()).exp();
    core + ((1.0 + sum) / (1.0 + diff)).ln()
}

/// Variable-node update given the partial-sum bit `u`: `b + (1 - 2u) a`.
#[inline]
pub fn g_op(a: f64, b: f64, u: u8) -> f64 {
    if u == 0 {
        b + a
    } else {
        b - a
    }
}

#[inline]
fn clamp(v: f64) -> f64 {
    v.clamp(-LLR_CLAMP, LLR_CLAMP)
}

/// Node-update counts of the last decode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount {
    pub f: u64,
    pub g: u64,
}

impl OpCount {
    pub fn total(&self) -> u64 {
        self.f + self.g
    }
}

/// Successive-cancellation decoder bound to one code. Scratch buffers are
/// reused across calls, so one instance per thread.
#[derive(Debug, Clone)]
pub struct ScDecoder<'a> {
    spec: &'a CodeSpec,
    // Level with node size m occupies [m, 2m).
    llr: Vec<f64>,
    partial: Vec<u8>,
    u_hat: Vec<u8>,
    decision_llrs: Vec<f64>,
    ops: OpCount,
}

impl<'a> ScDecoder<'a> {
    pub fn new(spec: &'a CodeSpec) -> Self {
        let n = spec.block_len();
        Self {
            spec,
            llr: vec![0.0; 2 * n],
            partial: vec![0; 2 * n],
            u_hat: vec![0; n],
            decision_llrs: vec![0.0; n],
            ops: OpCount::default(),
        }
    }

    pub fn spec(&self) -> &CodeSpec {
        self.spec
    }

    pub fn decode(&mut self, channel_llrs: &LlrBlock) -> Result<BitBlock> {
        self.run(channel_llrs)?;
        Ok(self.message())
    }

    /// Like [`ScDecoder::decode`] but takes a raw slice, rejecting
    /// non-finite values and clamping the rest.
    pub fn decode_slice(&mut self, channel_llrs: &[f64]) -> Result<BitBlock> {
        if let Some(pos) = channel_llrs.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("llr {pos} is not finite")));
        }
        self.run(channel_llrs)?;
        Ok(self.message())
    }

    /// Decoded `u` vector including frozen positions, from the last call.
    pub fn u_hat(&self) -> &[u8] {
        &self.u_hat
    }

    /// LLR on which each `u_i` decision was taken, from the last call.
    pub fn decision_llrs(&self) -> &[f64] {
        &self.decision_llrs
    }

    pub fn op_count(&self) -> OpCount {
        self.ops
    }

    fn message(&self) -> BitBlock {
        BitBlock::new(
            self.spec
                .info_set()
                .iter()
                .map(|&i| self.u_hat[i])
                .collect(),
        )
        .expect("decisions are binary")
    }

    fn run(&mut self, channel_llrs: &[f64]) -> Result<()> {
        let n = self.spec.block_len();
        check_len("channel llrs", n, channel_llrs.len())?;
        for (dst, &src) in self.llr[n..].iter_mut().zip(channel_llrs) {
            *dst = clamp(src);
        }
        bit_reverse_permute(&mut self.llr[n..]);
        self.ops = OpCount::default();
        self.node(n, 0);
        Ok(())
    }

    // Decodes the subtree whose input LLRs sit at level `size` and whose
    // first leaf is u[first]. Leaves the re-encoded bits at level `size`.
    fn node(&mut self, size: usize, first: usize) {
        if size == 1 {
            let llr = self.llr[1];
            let bit = if self.spec.is_info(first) {
                hard_decision(llr)
            } else {
                self.spec.frozen_value()
            };
            self.decision_llrs[first] = llr;
            self.u_hat[first] = bit;
            self.partial[1] = bit;
            return;
        }

        let half = size / 2;
        for i in 0..half {
            let a = self.llr[size + i];
            let b = self.llr[size + half + i];
            self.llr[half + i] = clamp(f_op(a, b));
        }
        self.ops.f += half as u64;
        self.node(half, first);
        for i in 0..half {
            self.partial[size + i] = self.partial[half + i];
        }

        for i in 0..half {
            let a = self.llr[size + i];
            let b = self.llr[size + half + i];
            self.llr[half + i] = clamp(g_op(a, b, self.partial[size + i]));
        }
        self.ops.g += half as u64;
        self.node(half, first + half);
        for i in 0..half {
            let right = self.partial[half + i];
            self.partial[size + i] ^= right;
            self.partial[size + half + i] = right;
        }
    }
}
