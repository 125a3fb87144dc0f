//! Experiment runners. Each operating point is split into `workers` shards;
//! shard `s` of point `p` draws from its own ChaCha8 stream derived from the
//! master seed, so totals depend only on the config, not on scheduling.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use vlc_polar::{
    codeword_region, ebn0_to_snr, efficiency_table, encode, plan_dimming, run_length_histogram,
    summarize_ber, AwgnChannel, BerSummary, BitBlock, ChannelParams, CodeSpec, DimmingPlan,
    EfficiencyRow, InterleaverMap, RunLengthHistogram, ScDecoder, TrialLedger, WeightHistogram,
};

use crate::config::{Axis, ExperimentConfig, ExperimentKind};
use crate::SimError;

#[derive(Debug, Clone, Copy)]
enum Stream {
    Message = 0,
    Noise = 1,
}

fn shard_rng(seed: u64, point: usize, shard: usize, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 32) | ((shard as u64) << 1) | stream as u64);
    rng
}

/// Splits `trials` into `workers` near-equal shards, larger shards first.
pub fn shard_sizes(trials: u64, workers: usize) -> Vec<u64> {
    let w = workers as u64;
    (0..w)
        .map(|i| trials / w + u64::from(i < trials % w))
        .collect()
}

fn random_message(rng: &mut impl Rng, len: usize) -> BitBlock {
    BitBlock::from_bools((0..len).map(|_| rng.random::<bool>()))
}

fn build_codes(cfg: &ExperimentConfig) -> Result<Vec<CodeSpec>, SimError> {
    cfg.rates
        .iter()
        .map(|&r| Ok(CodeSpec::construct(cfg.n, cfg.message_len(r), cfg.z0)?))
        .collect()
}

/// One row of a BER sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRow {
    pub rate: f64,
    pub dimming: f64,
    pub axis: Axis,
    pub axis_db: f64,
    /// Received SNR actually simulated.
    pub snr_db: f64,
    pub ledger: TrialLedger,
    pub summary: BerSummary,
}

struct Link<'a> {
    code: &'a CodeSpec,
    plan: DimmingPlan,
    map: InterleaverMap,
}

impl Link<'_> {
    fn run_shard(
        &self,
        params: ChannelParams,
        trials: u64,
        stop_after: Option<u64>,
        mut msg_rng: ChaCha8Rng,
        noise_rng: ChaCha8Rng,
    ) -> Result<TrialLedger, SimError> {
        let mut channel = AwgnChannel::with_rng(params, noise_rng);
        let mut decoder = ScDecoder::new(self.code);
        let mut ledger = TrialLedger::default();
        for _ in 0..trials {
            let msg = random_message(&mut msg_rng, self.code.message_len());
            let frame = vlc_polar::assemble_frame(&encode(self.code, &msg)?, &self.plan)?;
            let samples = channel.transmit(&self.map.apply(&frame)?);
            let llrs = self.map.invert(&channel.demodulate(&samples)?)?;
            let decoded = decoder.decode_slice(codeword_region(&llrs, &self.plan)?)?;
            ledger.record_block(msg.len(), decoded.hamming_distance(&msg)?);
            if stop_after.is_some_and(|limit| ledger.block_errors >= limit) {
                break;
            }
        }
        Ok(ledger)
    }
}

/// Full link simulation: encode, frame, interleave, transmit, demodulate,
/// deinterleave, strip compensation, decode. One row per
/// `(rate, dimming, grid point)` in config order.
pub fn run_ber_sweep(cfg: &ExperimentConfig) -> Result<Vec<BerRow>, SimError> {
    cfg.validate()?;
    let codes = build_codes(cfg)?;
    let grid = cfg.grid.points();
    let shards = shard_sizes(cfg.trials, cfg.workers);
    let stop_after = cfg
        .max_block_errors
        .map(|m| m.div_ceil(cfg.workers as u64).max(1));

    struct Point<'a> {
        rate: f64,
        dimming: f64,
        axis_db: f64,
        snr_db: f64,
        link: &'a Link<'a>,
    }

    let mut links = Vec::new();
    for (code, &rate) in codes.iter().zip(&cfg.rates) {
        for &dimming in &cfg.dimmings {
            let plan = plan_dimming(cfg.n, dimming)?;
            let map = cfg.interleaver.build(plan.frame_len())?;
            links.push((rate, dimming, Link { code, plan, map }));
        }
    }

    let mut points = Vec::new();
    for (rate, dimming, link) in &links {
        for &axis_db in &grid {
            let snr_db = match cfg.axis {
                Axis::Snr => axis_db,
                Axis::EbN0 => ebn0_to_snr(axis_db, link.code.rate())?,
            };
            points.push(Point {
                rate: *rate,
                dimming: *dimming,
                axis_db,
                snr_db,
                link,
            });
        }
    }

    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..shards.len()).map(move |s| (p, s)))
        .collect();
    let ledgers: Vec<TrialLedger> = jobs
        .par_iter()
        .map(|&(p, s)| {
            let point = &points[p];
            let params = ChannelParams::new(point.snr_db, point.link.code.rate(), cfg.seed)?;
            point.link.run_shard(
                params,
                shards[s],
                stop_after,
                shard_rng(cfg.seed, p, s, Stream::Message),
                shard_rng(cfg.seed, p, s, Stream::Noise),
            )
        })
        .collect::<Result<_, _>>()?;

    points
        .iter()
        .zip(ledgers.chunks(shards.len()))
        .map(|(point, parts)| {
            let ledger = parts
                .iter()
                .fold(TrialLedger::default(), |acc, l| acc.merged(l));
            Ok(BerRow {
                rate: point.rate,
                dimming: point.dimming,
                axis: cfg.axis,
                axis_db: point.axis_db,
                snr_db: point.snr_db,
                ledger,
                summary: summarize_ber(&ledger)?,
            })
        })
        .collect()
}

pub const BER_HEADER: &str = "rate,dimming,axis,axis_db,ber,fer,half_width,bits_sent";

pub fn ber_csv(rows: &[BerRow]) -> String {
    let mut out = format!("{BER_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.rate,
            r.dimming,
            r.axis,
            r.axis_db,
            r.summary.ber,
            r.summary.fer,
            r.summary.half_width,
            r.ledger.bits_sent
        );
    }
    out
}

/// Weight histogram of encoded random messages at one rate.
#[derive(Debug, Clone)]
pub struct WeightReport {
    pub rate: f64,
    pub code: CodeSpec,
    pub histogram: WeightHistogram,
}

fn encode_shards<T, F, M>(
    cfg: &ExperimentConfig,
    code: &CodeSpec,
    point: usize,
    init: F,
    visit: M,
) -> Result<Vec<T>, SimError>
where
    T: Send,
    F: Fn() -> T + Sync,
    M: Fn(&mut T, &BitBlock) -> Result<(), SimError> + Sync,
{
    shard_sizes(cfg.trials, cfg.workers)
        .into_par_iter()
        .enumerate()
        .map(|(s, count)| {
            let mut rng = shard_rng(cfg.seed, point, s, Stream::Message);
            let mut acc = init();
            for _ in 0..count {
                let cw = encode(code, &random_message(&mut rng, code.message_len()))?;
                visit(&mut acc, &cw)?;
            }
            Ok(acc)
        })
        .collect()
}

/// Encodes `trials` random messages per rate and histograms the weights.
pub fn run_weight_dist(cfg: &ExperimentConfig) -> Result<Vec<WeightReport>, SimError> {
    cfg.validate()?;
    let codes = build_codes(cfg)?;
    codes
        .into_iter()
        .zip(&cfg.rates)
        .enumerate()
        .map(|(point, (code, &rate))| {
            let parts = encode_shards(
                cfg,
                &code,
                point,
                || WeightHistogram::new(cfg.n),
                |h, cw| {
                    h.record_codeword(cw)?;
                    Ok(())
                },
            )?;
            let mut histogram = WeightHistogram::new(cfg.n);
            for part in &parts {
                histogram.merge(part)?;
            }
            Ok(WeightReport {
                rate,
                code,
                histogram,
            })
        })
        .collect()
}

pub const WEIGHT_HEADER: &str = "rate,weight,count";

/// Rows span the observed weight range, zero counts included.
pub fn weight_csv(reports: &[WeightReport]) -> String {
    let mut out = format!("{WEIGHT_HEADER}\n");
    for r in reports {
        let h = &r.histogram;
        if let (Some(lo), Some(hi)) = (h.min_weight(), h.max_weight()) {
            for w in lo..=hi {
                let _ = writeln!(out, "{},{},{}", r.rate, w, h.counts()[w]);
            }
        }
    }
    out
}

/// Run statistics of raw codewords, plus of transmitted frames for each
/// configured dimming ratio.
#[derive(Debug, Clone)]
pub struct RunLengthReport {
    pub rate: f64,
    pub codewords: RunLengthHistogram,
    pub frames: Vec<(f64, RunLengthHistogram)>,
}

pub fn run_run_length(cfg: &ExperimentConfig) -> Result<Vec<RunLengthReport>, SimError> {
    cfg.validate()?;
    let codes = build_codes(cfg)?;
    let mut links = Vec::new();
    for &d in &cfg.dimmings {
        let plan = plan_dimming(cfg.n, d)?;
        let map = cfg.interleaver.build(plan.frame_len())?;
        links.push((plan, map));
    }

    codes
        .into_iter()
        .zip(&cfg.rates)
        .enumerate()
        .map(|(point, (code, &rate))| {
            let empty = || {
                (
                    RunLengthHistogram::default(),
                    vec![RunLengthHistogram::default(); links.len()],
                )
            };
            let parts = encode_shards(cfg, &code, point, empty, |(cw_hist, frame_hists), cw| {
                cw_hist.merge(&run_length_histogram(cw));
                for ((plan, map), hist) in links.iter().zip(frame_hists.iter_mut()) {
                    let frame = map.apply(&vlc_polar::assemble_frame(cw, plan)?)?;
                    hist.merge(&run_length_histogram(&frame));
                }
                Ok(())
            })?;
            let (mut codewords, mut frames) = empty();
            for (cw_hist, frame_hists) in &parts {
                codewords.merge(cw_hist);
                for (acc, h) in frames.iter_mut().zip(frame_hists) {
                    acc.merge(h);
                }
            }
            Ok(RunLengthReport {
                rate,
                codewords,
                frames: cfg.dimmings.iter().copied().zip(frames).collect(),
            })
        })
        .collect()
}

pub const RUN_LENGTH_HEADER: &str = "rate,run_length,avg_count";

/// Codeword-level average run counts, one row per observed run length.
pub fn run_length_csv(reports: &[RunLengthReport]) -> String {
    let mut out = format!("{RUN_LENGTH_HEADER}\n");
    for r in reports {
        for &len in r.codewords.counts().keys() {
            let _ = writeln!(out, "{},{},{}", r.rate, len, r.codewords.avg_count(len));
        }
    }
    out
}

pub fn run_efficiency_table(cfg: &ExperimentConfig) -> Result<Vec<EfficiencyRow>, SimError> {
    cfg.validate()?;
    Ok(efficiency_table(cfg.n, &cfg.rates, &cfg.dimmings)?)
}

pub const EFFICIENCY_HEADER: &str = "dimming,scheme,code_rate,efficiency";

pub fn efficiency_csv(rows: &[EfficiencyRow]) -> String {
    let mut out = format!("{EFFICIENCY_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.dimming, r.scheme, r.code_rate, r.efficiency
        );
    }
    out
}

/// Runs the configured experiment and renders its CSV.
pub fn run_to_csv(cfg: &ExperimentConfig) -> Result<String, SimError> {
    Ok(match cfg.experiment {
        ExperimentKind::BerSweep => ber_csv(&run_ber_sweep(cfg)?),
        ExperimentKind::WeightDist => weight_csv(&run_weight_dist(cfg)?),
        ExperimentKind::RunLength => run_length_csv(&run_run_length(cfg)?),
        ExperimentKind::EfficiencyTable => efficiency_csv(&run_efficiency_table(cfg)?),
    })
}
