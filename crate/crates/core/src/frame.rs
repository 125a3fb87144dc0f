//! Transmit framing: dimming compensation, interleaving and run statistics.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::BitBlock;
use crate::error::{check_len, Error, Result};
use crate::metrics::RunLengthHistogram;

/// Largest compensation-symbol count a plan may request.
pub const MAX_COMPENSATION: usize = 1 << 32;

/// Frame geometry that brings a balanced codeword to a target ON ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimmingPlan {
    target: f64,
    code_len: usize,
    compensation: usize,
    cs_value: u8,
}

impl DimmingPlan {
    /// Sizes the compensation region for a codeword of `code_len` symbols,
    /// assuming the codeword carries `code_len / 2` ONs.
    pub fn new(code_len: usize, target: f64) -> Result<Self> {
        if !(target > 0.0 && target < 1.0) {
            return Err(Error::Parameter(format!(
                "dimming ratio must lie in (0, 1), got {target}"
            )));
        }
        if code_len < 2 {
            return Err(Error::Parameter(format!(
                "codeword length must be >= 2, got {code_len}"
            )));
        }
        let n = code_len as f64;
        let (exact, cs_value) = if target >= 0.5 {
            (n * (target - 0.5) / (1.0 - target), 1)
        } else {
            (n * (0.5 - target) / target, 0)
        };
        let rounded = exact.round();
        if !rounded.is_finite() || rounded > MAX_COMPENSATION as f64 {
            return Err(Error::Range(format!(
                "dimming ratio {target} needs {exact:.3e} compensation symbols for a \
                 {code_len}-symbol codeword, above the limit of {MAX_COMPENSATION}"
            )));
        }
        Ok(Self {
            target,
            code_len,
            compensation: rounded as usize,
            cs_value,
        })
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn code_len(&self) -> usize {
        self.code_len
    }

    /// Number of compensation symbols, `N_cs`.
    pub fn compensation(&self) -> usize {
        self.compensation
    }

    /// Symbol used for compensation: 1 (ON) at or above 50 %, else 0.
    pub fn cs_value(&self) -> u8 {
        self.cs_value
    }

    /// `N + N_cs`.
    pub fn frame_len(&self) -> usize {
        self.code_len + self.compensation
    }

    /// ON ratio of a frame whose codeword has exactly half its symbols ON.
    pub fn nominal_dimming(&self) -> f64 {
        let ons = self.code_len as f64 / 2.0 + (self.compensation * self.cs_value as usize) as f64;
        ons / self.frame_len() as f64
    }

    /// ON ratio of the frame built around a codeword of the given weight.
    pub fn achieved_dimming(&self, codeword_weight: usize) -> f64 {
        let ons = codeword_weight + self.compensation * self.cs_value as usize;
        ons as f64 / self.frame_len() as f64
    }

    /// Information bits per frame symbol, `K / (N + N_cs)`.
    pub fn efficiency(&self, message_len: usize) -> f64 {
        message_len as f64 / self.frame_len() as f64
    }
}

/// Builds the dimming plan for `code_len` symbols at ratio `target`.
pub fn plan_dimming(code_len: usize, target: f64) -> Result<DimmingPlan> {
    DimmingPlan::new(code_len, target)
}

/// Appends the compensation symbols after the codeword.
pub fn assemble_frame(codeword: &BitBlock, plan: &DimmingPlan) -> Result<BitBlock> {
    check_len("codeword", plan.code_len(), codeword.len())?;
    let mut frame = Vec::with_capacity(plan.frame_len());
    frame.extend_from_slice(codeword);
    frame.resize(plan.frame_len(), plan.cs_value());
    Ok(BitBlock::new(frame).expect("binary input"))
}

/// Strips the compensation region, returning the codeword symbols.
pub fn disassemble_frame(frame: &BitBlock, plan: &DimmingPlan) -> Result<BitBlock> {
    Ok(BitBlock::new(codeword_region(frame, plan)?.to_vec()).expect("binary input"))
}

/// The codeword part of any per-symbol frame buffer (bits or LLRs).
pub fn codeword_region<'a, T>(frame: &'a [T], plan: &DimmingPlan) -> Result<&'a [T]> {
    check_len("frame", plan.frame_len(), frame.len())?;
    Ok(&frame[..plan.code_len()])
}

/// How an interleaver permutation is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterleaverSpec {
    #[default]
    None,
    /// Write row-wise into `rows x cols`, read column-wise.
    RowCol { rows: usize, cols: usize },
    /// Uniform random permutation from a ChaCha8 stream.
    Seeded(u64),
}

impl InterleaverSpec {
    /// Builds the permutation for a frame of `len` symbols.
    ///
    /// A row-column shape whose area differs from `len` keeps its row count
    /// and takes `ceil(len / rows)` columns; cells past `len` are skipped
    /// when reading.
    pub fn build(&self, len: usize) -> Result<InterleaverMap> {
        match *self {
            InterleaverSpec::None => Ok(InterleaverMap::identity(len)),
            InterleaverSpec::RowCol { rows, cols } => {
                if rows == 0 || cols == 0 {
                    return Err(Error::Parameter("interleaver shape must be nonzero".into()));
                }
                let cols = if rows * cols == len {
                    cols
                } else {
                    len.div_ceil(rows)
                };
                Ok(InterleaverMap::row_column(len, rows, cols))
            }
            InterleaverSpec::Seeded(seed) => Ok(InterleaverMap::seeded(len, seed)),
        }
    }
}

impl fmt::Display for InterleaverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InterleaverSpec::None => f.write_str("none"),
            InterleaverSpec::RowCol { rows, cols } => write!(f, "rowcol:{rows}x{cols}"),
            InterleaverSpec::Seeded(seed) => write!(f, "seeded:{seed}"),
        }
    }
}

impl FromStr for InterleaverSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unrecognised interleaver {s:?}"));
        if s == "none" {
            return Ok(InterleaverSpec::None);
        }
        if let Some(shape) = s.strip_prefix("rowcol:") {
            let (r, c) = shape.split_once(['x', 'X']).ok_or_else(bad)?;
            let rows = r.trim().parse().map_err(|_| bad())?;
            let cols = c.trim().parse().map_err(|_| bad())?;
            if rows == 0 || cols == 0 {
                return Err(bad());
            }
            return Ok(InterleaverSpec::RowCol { rows, cols });
        }
        if let Some(seed) = s.strip_prefix("seeded:") {
            return Ok(InterleaverSpec::Seeded(
                seed.trim().parse().map_err(|_| bad())?,
            ));
        }
        Err(bad())
    }
}

/// A permutation of frame positions. `output[p] = input[perm[p]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleaverMap {
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl InterleaverMap {
    /// Wraps an explicit permutation, verifying it is a bijection.
    pub fn from_permutation(perm: Vec<usize>) -> Result<Self> {
        let mut inverse = vec![usize::MAX; perm.len()];
        for (p, &src) in perm.iter().enumerate() {
            if src >= perm.len() || inverse[src] != usize::MAX {
                return Err(Error::Parameter(format!(
                    "not a permutation: index {src} at position {p}"
                )));
            }
            inverse[src] = p;
        }
        Ok(Self { perm, inverse })
    }

    pub fn identity(len: usize) -> Self {
        let perm: Vec<usize> = (0..len).collect();
        Self {
            inverse: perm.clone(),
            perm,
        }
    }

    pub fn row_column(len: usize, rows: usize, cols: usize) -> Self {
        debug_assert!(rows * cols >= len);
        let perm: Vec<usize> = (0..cols)
            .flat_map(|c| (0..rows).map(move |r| r * cols + c))
            .filter(|&i| i < len)
            .collect();
        Self::from_permutation(perm).expect("row-column reading is a bijection")
    }

    pub fn seeded(len: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..len).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self::from_permutation(perm).expect("shuffle is a bijection")
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Permutes any per-symbol buffer.
    pub fn apply<T: Copy>(&self, input: &[T]) -> Result<Vec<T>> {
        check_len("interleaver input", self.len(), input.len())?;
        Ok(self.perm.iter().map(|&src| input[src]).collect())
    }

    /// Inverse of [`InterleaverMap::apply`].
    pub fn invert<T: Copy>(&self, input: &[T]) -> Result<Vec<T>> {
        check_len("deinterleaver input", self.len(), input.len())?;
        Ok(self.inverse.iter().map(|&p| input[p]).collect())
    }
}

pub fn interleave(frame: &BitBlock, map: &InterleaverMap) -> Result<BitBlock> {
    Ok(BitBlock::new(map.apply(frame)?).expect("binary input"))
}

pub fn deinterleave(frame: &BitBlock, map: &InterleaverMap) -> Result<BitBlock> {
    Ok(BitBlock::new(map.invert(frame)?).expect("binary input"))
}

/// Counts maximal runs of identical symbols by length.
pub fn run_length_histogram(frame: &[u8]) -> RunLengthHistogram {
    let mut hist = RunLengthHistogram::default();
    let mut iter = frame.iter();
    let Some(mut current) = iter.next() else {
        return hist;
    };
    let mut run = 1;
    for sym in iter {
        if sym == current {
            run += 1;
        } else {
            hist.record(run);
            current = sym;
            run = 1;
        }
    }
    hist.record(run);
    hist
}
