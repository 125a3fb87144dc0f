//! Experiment configuration: a plain `key = value` file, optionally
//! overridden key by key from the command line.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use vlc_polar::{InterleaverSpec, DEFAULT_DESIGN_Z};

use crate::SimError;

/// Keys accepted in a config file or as flags.
pub const KEYS: &[&str] = &[
    "experiment",
    "n",
    "rates",
    "dimmings",
    "axis",
    "grid_db",
    "trials",
    "interleaver",
    "seed",
    "out",
    "z0",
    "workers",
    "max_block_errors",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    WeightDist,
    RunLength,
    BerSweep,
    EfficiencyTable,
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "weight_dist" => Ok(Self::WeightDist),
            "run_length" => Ok(Self::RunLength),
            "ber_sweep" => Ok(Self::BerSweep),
            "efficiency_table" | "efficiency" => Ok(Self::EfficiencyTable),
            other => Err(format!(
                "unknown experiment {other:?}; expected weight_dist, run_length, ber_sweep or efficiency_table"
            )),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::WeightDist => "weight_dist",
            Self::RunLength => "run_length",
            Self::BerSweep => "ber_sweep",
            Self::EfficiencyTable => "efficiency_table",
        })
    }
}

/// What the sweep grid is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Snr,
    EbN0,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "snr" => Ok(Self::Snr),
            "ebn0" => Ok(Self::EbN0),
            other => Err(format!("axis must be snr or ebn0, got {other:?}")),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Snr => "snr",
            Self::EbN0 => "ebn0",
        })
    }
}

/// Inclusive `start:stop:step` grid in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn single(value: f64) -> Self {
        Self {
            start: value,
            stop: value,
            step: 1.0,
        }
    }

    /// Grid points, rounded to 1e-6 dB so accumulated steps print cleanly.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| ((self.start + i as f64 * self.step) * 1e6).round() / 1e6)
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("not a finite number: {t:?}"))
        };
        let grid = match parts[..] {
            [v] => Grid::single(num(v)?),
            [a, b] => Grid {
                start: num(a)?,
                stop: num(b)?,
                step: 0.5,
            },
            [a, b, c] => Grid {
                start: num(a)?,
                stop: num(b)?,
                step: num(c)?,
            },
            _ => return Err(format!("expected start:stop:step, got {s:?}")),
        };
        if grid.step <= 0.0 {
            return Err("grid step must be positive".into());
        }
        if grid.stop < grid.start {
            return Err("grid stop lies below start".into());
        }
        Ok(grid)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

/// A fully validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Codeword length N.
    pub n: usize,
    pub rates: Vec<f64>,
    pub dimmings: Vec<f64>,
    pub axis: Axis,
    pub grid: Grid,
    /// Codewords per operating point.
    pub trials: u64,
    pub interleaver: InterleaverSpec,
    pub seed: u64,
    /// `None` writes to standard output.
    pub out: Option<PathBuf>,
    /// Design parameter of the code construction.
    pub z0: f64,
    /// Number of trial shards per operating point. Results depend on it.
    pub workers: usize,
    /// Stop a point after this many block errors (summed over shards).
    pub max_block_errors: Option<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::BerSweep,
            n: 1024,
            rates: vec![0.25, 0.5, 0.75],
            dimmings: vec![0.5],
            axis: Axis::Snr,
            grid: Grid {
                start: 0.0,
                stop: 10.0,
                step: 0.5,
            },
            trials: 10_000,
            interleaver: InterleaverSpec::RowCol { rows: 32, cols: 32 },
            seed: 1,
            out: None,
            z0: DEFAULT_DESIGN_Z,
            workers: 8,
            max_block_errors: None,
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> SimError {
    SimError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn parse_list(field: &str, value: &str) -> Result<Vec<f64>, SimError> {
    let items: Result<Vec<f64>, _> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse::<f64>)
        .collect();
    let items = items.map_err(|e| invalid(field, e.to_string()))?;
    if items.is_empty() {
        return Err(invalid(field, "list is empty"));
    }
    Ok(items)
}

fn parse_field<T: FromStr>(field: &str, value: &str) -> Result<T, SimError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e: T::Err| invalid(field, e.to_string()))
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, SimError> {
    let mut pairs = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            invalid(
                "config",
                format!("line {}: expected key = value", lineno + 1),
            )
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(invalid(key, format!("line {}: unknown key", lineno + 1)));
        }
        if pairs
            .insert(key.to_string(), value.trim().to_string())
            .is_some()
        {
            return Err(invalid(key, format!("line {}: duplicate key", lineno + 1)));
        }
    }
    Ok(pairs)
}

impl ExperimentConfig {
    /// Builds a config from key-value pairs layered over the defaults.
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self, SimError> {
        let mut cfg = Self::default();
        for (key, value) in pairs {
            match key.as_str() {
                "experiment" => cfg.experiment = parse_field(key, value)?,
                "n" => cfg.n = parse_field(key, value)?,
                "rates" => cfg.rates = parse_list(key, value)?,
                "dimmings" => cfg.dimmings = parse_list(key, value)?,
                "axis" => cfg.axis = parse_field(key, value)?,
                "grid_db" => cfg.grid = parse_field(key, value)?,
                "trials" => cfg.trials = parse_field(key, value)?,
                "interleaver" => cfg.interleaver = parse_field(key, value)?,
                "seed" => cfg.seed = parse_field(key, value)?,
                "out" => {
                    cfg.out = match value.trim() {
                        "" | "-" => None,
                        path => Some(PathBuf::from(path)),
                    }
                }
                "z0" => cfg.z0 = parse_field(key, value)?,
                "workers" => cfg.workers = parse_field(key, value)?,
                "max_block_errors" => {
                    cfg.max_block_errors = match value.trim() {
                        "" | "none" | "0" => None,
                        v => Some(parse_field(key, v)?),
                    }
                }
                other => return Err(invalid(other, "unknown key")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_text(text: &str) -> Result<Self, SimError> {
        Self::from_pairs(&parse_pairs(text)?)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.n < 2 || !self.n.is_power_of_two() {
            return Err(invalid(
                "n",
                format!("{} is not a power of two >= 2", self.n),
            ));
        }
        for &r in &self.rates {
            if !(r > 0.0 && r <= 1.0) {
                return Err(invalid("rates", format!("{r} outside (0, 1]")));
            }
            let k = self.message_len(r);
            if k == 0 || k > self.n {
                return Err(invalid(
                    "rates",
                    format!("rate {r} gives K = {k} for N = {}", self.n),
                ));
            }
        }
        for &d in &self.dimmings {
            if !(d > 0.0 && d < 1.0) {
                return Err(invalid("dimmings", format!("{d} outside (0, 1)")));
            }
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(invalid("workers", "must be at least 1"));
        }
        if !(self.z0 > 0.0 && self.z0 < 1.0) {
            return Err(invalid("z0", format!("{} outside (0, 1)", self.z0)));
        }
        if self.grid.points().is_empty() {
            return Err(invalid("grid_db", "grid is empty"));
        }
        Ok(())
    }

    /// K for a given rate, `round(rate * N)`.
    pub fn message_len(&self, rate: f64) -> usize {
        (rate * self.n as f64).round() as usize
    }

    /// Renders the config back into file form.
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        s += &format!("experiment = {}\n", self.experiment);
        s += &format!("n = {}\n", self.n);
        s += &format!("rates = {}\n", list(&self.rates));
        s += &format!("dimmings = {}\n", list(&self.dimmings));
        s += &format!("axis = {}\n", self.axis);
        s += &format!("grid_db = {}\n", self.grid);
        s += &format!("trials = {}\n", self.trials);
        s += &format!("interleaver = {}\n", self.interleaver);
        s += &format!("seed = {}\n", self.seed);
        s += &format!(
            "out = {}\n",
            self.out
                .as_ref()
                .map_or("-".to_string(), |p| p.display().to_string())
        );
        s += &format!("z0 = {}\n", self.z0);
        s += &format!("workers = {}\n", self.workers);
        s += &format!(
            "max_block_errors = {}\n",
            self.max_block_errors
                .map_or("none".to_string(), |m| m.to_string())
        );
        s
    }
}
