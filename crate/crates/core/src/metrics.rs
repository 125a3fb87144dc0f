//! Experiment statistics: weight and run-length histograms, error ledgers
//! and overall coding efficiency.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{check_len, Error, Result};
use crate::frame::DimmingPlan;

/// Distribution of codeword Hamming weights for a fixed block length.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightHistogram {
    counts: Vec<u64>,
    samples: u64,
    // Welford accumulators
    running_mean: f64,
    running_m2: f64,
}

impl WeightHistogram {
    pub fn new(block_len: usize) -> Self {
        Self {
            counts: vec![0; block_len + 1],
            samples: 0,
            running_mean: 0.0,
            running_m2: 0.0,
        }
    }

    pub fn block_len(&self) -> usize {
        self.counts.len() - 1
    }

    /// Adds one codeword; returns its weight.
    pub fn record_codeword(&mut self, codeword: &[u8]) -> Result<usize> {
        check_len("codeword", self.block_len(), codeword.len())?;
        let weight = codeword.iter().filter(|&&b| b == 1).count();
        self.record_weight(weight);
        Ok(weight)
    }

    fn record_weight(&mut self, weight: usize) {
        self.counts[weight] += 1;
        self.samples += 1;
        let w = weight as f64;
        let delta = w - self.running_mean;
        self.running_mean += delta / self.samples as f64;
        self.running_m2 += delta * (w - self.running_mean);
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    /// Mean weight recomputed from the counts.
    pub fn mean(&self) -> Option<f64> {
        (self.samples > 0).then(|| {
            let total: f64 = self
                .counts
                .iter()
                .enumerate()
                .map(|(w, &c)| w as f64 * c as f64)
                .sum();
            total / self.samples as f64
        })
    }

    /// Population standard deviation recomputed from the counts.
    pub fn std_dev(&self) -> Option<f64> {
        let mean = self.mean()?;
        let var: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(w, &c)| c as f64 * (w as f64 - mean).powi(2))
            .sum::<f64>()
            / self.samples as f64;
        Some(var.sqrt())
    }

    pub fn running_mean(&self) -> Option<f64> {
        (self.samples > 0).then_some(self.running_mean)
    }

    pub fn running_std_dev(&self) -> Option<f64> {
        (self.samples > 0).then(|| (self.running_m2 / self.samples as f64).sqrt())
    }

    /// Fraction of samples with weight in `lo..=hi`.
    pub fn fraction_within(&self, lo: usize, hi: usize) -> Option<f64> {
        if self.samples == 0 {
            return None;
        }
        let hi = hi.min(self.block_len());
        let inside: u64 = self.counts.get(lo..=hi).map_or(0, |c| c.iter().sum());
        Some(inside as f64 / self.samples as f64)
    }

    pub fn min_weight(&self) -> Option<usize> {
        self.counts.iter().position(|&c| c > 0)
    }

    pub fn max_weight(&self) -> Option<usize> {
        self.counts.iter().rposition(|&c| c > 0)
    }

    /// Combines two histograms of the same block length. Counts add exactly;
    /// the running moments are merged with the parallel Welford update.
    pub fn merge(&mut self, other: &WeightHistogram) -> Result<()> {
        check_len("merged histogram", self.block_len(), other.block_len())?;
        if other.samples == 0 {
            return Ok(());
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        let (na, nb) = (self.samples as f64, other.samples as f64);
        let n = na + nb;
        let delta = other.running_mean - self.running_mean;
        self.running_mean += delta * nb / n;
        self.running_m2 += other.running_m2 + delta * delta * na * nb / n;
        self.samples += other.samples;
        Ok(())
    }
}

/// Maximal-run counts keyed by run length, accumulated over frames.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunLengthHistogram {
    counts: BTreeMap<usize, u64>,
    frames: u64,
}

impl RunLengthHistogram {
    pub(crate) fn record(&mut self, run: usize) {
        if self.frames == 0 {
            self.frames = 1;
        }
        *self.counts.entry(run).or_insert(0) += 1;
    }

    /// Number of runs of exactly `len` symbols.
    pub fn count(&self, len: usize) -> u64 {
        self.counts.get(&len).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    /// Number of frames merged into this histogram.
    pub fn frames(&self) -> u64 {
        self.frames
    }

    pub fn runs(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Sum of `len * count(len)`, equal to the number of symbols seen.
    pub fn total_bits(&self) -> u64 {
        self.counts.iter().map(|(&l, &c)| l as u64 * c).sum()
    }

    /// Symbols that sit in runs strictly shorter than `len`.
    pub fn bits_in_runs_shorter_than(&self, len: usize) -> u64 {
        self.counts.range(..len).map(|(&l, &c)| l as u64 * c).sum()
    }

    pub fn max_run(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    /// Runs of length `len` per frame.
    pub fn avg_count(&self, len: usize) -> f64 {
        if self.frames == 0 {
            0.0
        } else {
            self.count(len) as f64 / self.frames as f64
        }
    }

    pub fn merge(&mut self, other: &RunLengthHistogram) {
        for (&l, &c) in &other.counts {
            *self.counts.entry(l).or_insert(0) += c;
        }
        self.frames += other.frames;
    }
}

/// Monte Carlo error counts at one operating point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialLedger {
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub blocks_sent: u64,
    pub block_errors: u64,
}

impl TrialLedger {
    /// Records one decoded block with `bit_errors` wrong bits out of `bits`.
    pub fn record_block(&mut self, bits: usize, bit_errors: usize) {
        debug_assert!(bit_errors <= bits);
        self.bits_sent += bits as u64;
        self.bit_errors += bit_errors as u64;
        self.blocks_sent += 1;
        self.block_errors += u64::from(bit_errors > 0);
    }

    pub fn merge(&mut self, other: &TrialLedger) {
        self.bits_sent += other.bits_sent;
        self.bit_errors += other.bit_errors;
        self.blocks_sent += other.blocks_sent;
        self.block_errors += other.block_errors;
    }

    pub fn merged(mut self, other: &TrialLedger) -> TrialLedger {
        self.merge(other);
        self
    }
}

/// Point estimates and 95 % Wald half-width on the bit error rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerSummary {
    pub ber: f64,
    pub fer: f64,
    pub half_width: f64,
}

pub fn summarize_ber(ledger: &TrialLedger) -> Result<BerSummary> {
    if ledger.bits_sent == 0 || ledger.blocks_sent == 0 {
        return Err(Error::UndefinedStatistic("no bits recorded in ledger"));
    }
    let n = ledger.bits_sent as f64;
    let ber = ledger.bit_errors as f64 / n;
    Ok(BerSummary {
        ber,
        fer: ledger.block_errors as f64 / ledger.blocks_sent as f64,
        half_width: 1.96 * (ber * (1.0 - ber) / n).sqrt(),
    })
}

/// Coding schemes listed in the efficiency comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Polar,
    /// Modified Reed-Muller scheme, cited figures.
    ReedMuller,
    /// Adaptive LDPC scheme, cited figures.
    Ldpc,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Polar => "polar",
            Scheme::ReedMuller => "rm",
            Scheme::Ldpc => "ldpc",
        })
    }
}

/// Published `(code rate, efficiency)` of the reference schemes, keyed by the
/// dimming ratio at or above 50 %. Ratios below 50 % share the mirrored row.
const BASELINES: [(f64, Scheme, f64, f64); 6] = [
    (0.5, Scheme::ReedMuller, 0.156, 0.156),
    (0.5, Scheme::Ldpc, 0.5, 0.24),
    (0.75, Scheme::ReedMuller, 0.25, 0.125),
    (0.75, Scheme::Ldpc, 0.5, 0.12),
    (0.875, Scheme::ReedMuller, 0.375, 0.093),
    (0.875, Scheme::Ldpc, 0.5, 0.06),
];

/// Cited baseline rows for `dimming`, if that ratio has published figures.
pub fn baseline_efficiency(dimming: f64) -> Vec<(Scheme, f64, f64)> {
    let key = if dimming < 0.5 {
        1.0 - dimming
    } else {
        dimming
    };
    BASELINES
        .iter()
        .filter(|(d, ..)| (d - key).abs() < 1e-9)
        .map(|&(_, scheme, rate, eff)| (scheme, rate, eff))
        .collect()
}

/// One row of the efficiency comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyRow {
    pub dimming: f64,
    pub scheme: Scheme,
    pub code_rate: f64,
    pub efficiency: f64,
}

/// `K / (N + N_cs)` for a polar code of rate `rate` and length `code_len`.
pub fn overall_efficiency(code_len: usize, rate: f64, dimming: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::Parameter(format!(
            "code rate must lie in (0, 1], got {rate}"
        )));
    }
    let plan = DimmingPlan::new(code_len, dimming)?;
    Ok(rate * code_len as f64 / plan.frame_len() as f64)
}

/// Efficiency of the polar scheme for every `(dimming, rate)` pair, followed
/// by any cited baselines for that dimming ratio. Rows are grouped by
/// dimming in input order.
pub fn efficiency_table(
    code_len: usize,
    rates: &[f64],
    dimmings: &[f64],
) -> Result<Vec<EfficiencyRow>> {
    let mut rows = Vec::new();
    for &dimming in dimmings {
        for &rate in rates {
            rows.push(EfficiencyRow {
                dimming,
                scheme: Scheme::Polar,
                code_rate: rate,
                efficiency: overall_efficiency(code_len, rate, dimming)?,
            });
        }
        rows.extend(baseline_efficiency(dimming).into_iter().map(
            |(scheme, code_rate, efficiency)| EfficiencyRow {
                dimming,
                scheme,
                code_rate,
                efficiency,
            },
        ));
    }
    Ok(rows)
}
