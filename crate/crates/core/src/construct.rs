//! Bit-channel reliability and information-set selection.
//!
//! Reliability is tracked with the Bhattacharyya recursion of the binary
//! erasure channel: a channel with parameter `z` splits into a degraded
//! channel `2z - z^2` and an upgraded channel `z^2`. Scores are indexed by
//! the position of the corresponding bit in the encoder input `u`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default design parameter of the construction, the erasure probability of
/// the seed channel.
pub const DEFAULT_DESIGN_Z: f64 = 0.5;

/// Largest supported stage count.
pub const MAX_STAGES: u32 = 24;

/// One polarization step: `(degraded, upgraded)` Bhattacharyya parameters.
#[inline]
pub fn polarize(z: f64) -> (f64, f64) {
    (2.0 * z - z * z, z * z)
}

/// Per-coordinate unreliability scores for a length `2^stages` code.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityProfile {
    stages: u32,
    scores: Vec<f64>,
    design_z: f64,
}

impl ReliabilityProfile {
    pub fn stages(&self) -> u32 {
        self.stages
    }

    pub fn block_len(&self) -> usize {
        self.scores.len()
    }

    /// Unreliability of each coordinate channel, in `[0, 1]`.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn design_z(&self) -> f64 {
        self.design_z
    }
}

/// Runs the Bhattacharyya recursion `stages` times from `design_z`.
pub fn compute_reliability(stages: u32, design_z: f64) -> Result<ReliabilityProfile> {
    if stages == 0 || stages > MAX_STAGES {
        return Err(Error::Parameter(format!(
            "stage count must be in 1..={MAX_STAGES}, got {stages}"
        )));
    }
    if !(design_z > 0.0 && design_z < 1.0) {
        return Err(Error::Parameter(format!(
            "design parameter must lie in (0, 1), got {design_z}"
        )));
    }

    let mut scores = vec![design_z];
    for _ in 0..stages {
        // Each stage appends one less-significant bit to every index.
        scores = scores
            .iter()
            .flat_map(|&z| {
                let (worse, better) = polarize(z);
                [worse, better]
            })
            .collect();
    }

    Ok(ReliabilityProfile {
        stages,
        scores,
        design_z,
    })
}

/// Identity of one polar code: length, dimension and information set.
///
/// Frozen positions always carry zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    block_len: usize,
    info_set: Vec<usize>,
    frozen_value: u8,
    // true where the coordinate carries a message bit
    info_mask: Vec<bool>,
}

impl CodeSpec {
    /// Validates and builds a spec from an explicit information set.
    pub fn new(block_len: usize, mut info_set: Vec<usize>) -> Result<Self> {
        if block_len < 2 || !block_len.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "block length must be a power of two >= 2, got {block_len}"
            )));
        }
        if info_set.is_empty() || info_set.len() > block_len {
            return Err(Error::Parameter(format!(
                "message length must be in 1..={block_len}, got {}",
                info_set.len()
            )));
        }
        info_set.sort_unstable();
        let mut info_mask = vec![false; block_len];
        for &i in &info_set {
            if i >= block_len {
                return Err(Error::Parameter(format!(
                    "info index {i} out of range for length {block_len}"
                )));
            }
            if info_mask[i] {
                return Err(Error::Parameter(format!("duplicate info index {i}")));
            }
            info_mask[i] = true;
        }
        Ok(Self {
            block_len,
            info_set,
            frozen_value: 0,
            info_mask,
        })
    }

    /// Builds the `(block_len, message_len)` code from the Bhattacharyya
    /// profile seeded with `design_z`.
    pub fn construct(block_len: usize, message_len: usize, design_z: f64) -> Result<Self> {
        if block_len < 2 || !block_len.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "block length must be a power of two >= 2, got {block_len}"
            )));
        }
        let profile = compute_reliability(block_len.trailing_zeros(), design_z)?;
        select_info_set(&profile, message_len)
    }

    /// Codeword length N.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Message length K.
    pub fn message_len(&self) -> usize {
        self.info_set.len()
    }

    pub fn stages(&self) -> u32 {
        self.block_len.trailing_zeros()
    }

    /// Sorted information coordinates.
    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn frozen_value(&self) -> u8 {
        self.frozen_value
    }

    pub fn is_info(&self, index: usize) -> bool {
        self.info_mask[index]
    }

    pub fn info_mask(&self) -> &[bool] {
        &self.info_mask
    }

    /// Sorted frozen coordinates (complement of the information set).
    pub fn frozen_set(&self) -> Vec<usize> {
        (0..self.block_len)
            .filter(|&i| !self.info_mask[i])
            .collect()
    }

    /// K / N.
    pub fn rate(&self) -> f64 {
        self.message_len() as f64 / self.block_len as f64
    }

    /// Two-line text form: `N K frozen_value`, then the information set.
    pub fn to_text(&self) -> String {
        let indices: Vec<String> = self.info_set.iter().map(usize::to_string).collect();
        format!(
            "{} {} {}\n{}\n",
            self.block_len,
            self.message_len(),
            self.frozen_value,
            indices.join(" ")
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header line".into()))?;
        let fields = parse_numbers(header)?;
        let [n, k, frozen] = fields[..] else {
            return Err(Error::Parse(format!(
                "header needs 3 fields, got {}",
                fields.len()
            )));
        };
        if frozen != 0 {
            return Err(Error::Parse(format!(
                "frozen value must be 0, got {frozen}"
            )));
        }
        let info_set = parse_numbers(lines.next().unwrap_or(""))?;
        if info_set.len() != k {
            return Err(Error::Parse(format!(
                "header declares K = {k} but {} indices follow",
                info_set.len()
            )));
        }
        if info_set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("info set must be strictly ascending".into()));
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Parse("trailing content after info set".into()));
        }
        Self::new(n, info_set)
    }
}

fn parse_numbers(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse()
                .map_err(|_| Error::Parse(format!("not an index: {tok:?}")))
        })
        .collect()
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_text(s)
    }
}

/// Picks the `message_len` coordinates with the smallest unreliability.
/// Equal scores go to the lower index.
pub fn select_info_set(profile: &ReliabilityProfile, message_len: usize) -> Result<CodeSpec> {
    let n = profile.block_len();
    if message_len == 0 || message_len > n {
        return Err(Error::Parameter(format!(
            "message length must be in 1..={n}, got {message_len}"
        )));
    }
    let scores = profile.scores();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| match scores[a].total_cmp(&scores[b]) {
        Ordering::Equal => a.cmp(&b),
        other => other,
    });
    order.truncate(message_len);
    CodeSpec::new(n, order)
}
