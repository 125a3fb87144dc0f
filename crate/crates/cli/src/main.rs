use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use vlc_polar_sim::config::parse_pairs;
use vlc_polar_sim::experiment::{ber_csv, efficiency_csv, run_length_csv, weight_csv};
use vlc_polar_sim::{
    run_ber_sweep, run_efficiency_table, run_run_length, run_weight_dist, ExperimentConfig,
    ExperimentKind, SimError,
};

/// Monte Carlo experiments for polar-coded dimmable VLC.
///
/// Every flag mirrors a config-file key and takes precedence over it.
#[derive(Debug, Parser)]
#[command(name = "vlcsim", version)]
struct Args {
    /// Config file of `key = value` lines.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// weight_dist | run_length | ber_sweep | efficiency_table
    #[arg(long)]
    experiment: Option<String>,
    /// Codeword length N (power of two).
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated code rates.
    #[arg(long)]
    rates: Option<String>,
    /// Comma-separated dimming ratios.
    #[arg(long)]
    dimmings: Option<String>,
    /// snr | ebn0
    #[arg(long)]
    axis: Option<String>,
    /// start:stop:step in dB.
    #[arg(long = "grid-db", alias = "grid_db", allow_hyphen_values = true)]
    grid_db: Option<String>,
    /// Codewords per operating point.
    #[arg(long)]
    trials: Option<String>,
    /// rowcol:RxC | seeded:S | none
    #[arg(long)]
    interleaver: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output CSV path, `-` for stdout.
    #[arg(short, long)]
    out: Option<String>,
    /// Construction design parameter in (0, 1).
    #[arg(long)]
    z0: Option<String>,
    /// Trial shards per operating point.
    #[arg(long)]
    workers: Option<String>,
    /// Stop a point after this many block errors.
    #[arg(long = "max-block-errors", alias = "max_block_errors")]
    max_block_errors: Option<String>,
    /// Print the resolved config and exit.
    #[arg(long)]
    dry_run: bool,
}

impl Args {
    fn overrides(&self) -> BTreeMap<String, String> {
        [
            ("experiment", &self.experiment),
            ("n", &self.n),
            ("rates", &self.rates),
            ("dimmings", &self.dimmings),
            ("axis", &self.axis),
            ("grid_db", &self.grid_db),
            ("trials", &self.trials),
            ("interleaver", &self.interleaver),
            ("seed", &self.seed),
            ("out", &self.out),
            ("z0", &self.z0),
            ("workers", &self.workers),
            ("max_block_errors", &self.max_block_errors),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v)))
        .collect()
    }
}

fn resolve(args: &Args) -> Result<ExperimentConfig, SimError> {
    let mut pairs = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| SimError::Io {
                path: path.clone(),
                source,
            })?;
            parse_pairs(&text)?
        }
        None => BTreeMap::new(),
    };
    pairs.extend(args.overrides());
    ExperimentConfig::from_pairs(&pairs)
}

fn run(cfg: &ExperimentConfig) -> Result<String, SimError> {
    Ok(match cfg.experiment {
        ExperimentKind::BerSweep => {
            let rows = run_ber_sweep(cfg)?;
            for r in &rows {
                eprintln!(
                    "rate {} dimming {} {} {} dB: ber {:.3e} fer {:.3e} ({} bits)",
                    r.rate,
                    r.dimming,
                    r.axis,
                    r.axis_db,
                    r.summary.ber,
                    r.summary.fer,
                    r.ledger.bits_sent
                );
            }
            ber_csv(&rows)
        }
        ExperimentKind::WeightDist => {
            let reports = run_weight_dist(cfg)?;
            for r in &reports {
                let h = &r.histogram;
                let half = cfg.n / 2;
                let spread = cfg.n * 3 / 128;
                eprintln!(
                    "rate {}: mean {:.2} std {:.2} within [{}, {}] {:.3}",
                    r.rate,
                    h.mean().unwrap_or(f64::NAN),
                    h.std_dev().unwrap_or(f64::NAN),
                    half - spread,
                    half + spread,
                    h.fraction_within(half - spread, half + spread)
                        .unwrap_or(f64::NAN)
                );
            }
            weight_csv(&reports)
        }
        ExperimentKind::RunLength => {
            let reports = run_run_length(cfg)?;
            for r in &reports {
                let cw = &r.codewords;
                eprintln!(
                    "rate {}: {:.1} bits/codeword in runs < 5, max run {}",
                    r.rate,
                    cw.bits_in_runs_shorter_than(5) as f64 / cw.frames().max(1) as f64,
                    cw.max_run().unwrap_or(0)
                );
                for (d, h) in &r.frames {
                    eprintln!(
                        "  frames at dimming {d}: max run {}",
                        h.max_run().unwrap_or(0)
                    );
                }
            }
            run_length_csv(&reports)
        }
        ExperimentKind::EfficiencyTable => efficiency_csv(&run_efficiency_table(cfg)?),
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = resolve(&args).and_then(|cfg| {
        if args.dry_run {
            print!("{}", cfg.to_text());
            return Ok(());
        }
        let csv = run(&cfg)?;
        match &cfg.out {
            Some(path) => fs::write(path, csv).map_err(|source| SimError::Io {
                path: path.clone(),
                source,
            }),
            None => {
                print!("{csv}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vlcsim: {e}");
            ExitCode::FAILURE
        }
    }
}
