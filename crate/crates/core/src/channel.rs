//! Flat OOK link with additive white Gaussian noise.
//!
//! Symbols are sent at intensities `{0, A}` with `A = 1`. The noise standard
//! deviation is `(A/2) / sqrt(SNR)` so a threshold detector at `A/2` sees an
//! uncoded error rate of exactly `Q(sqrt(SNR))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bits::LlrBlock;
use crate::error::{Error, Result};

/// Received ON amplitude.
pub const AMPLITUDE: f64 = 1.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Noise standard deviation for a received SNR in dB.
pub fn snr_to_sigma(snr_db: f64) -> f64 {
    (AMPLITUDE / 2.0) / db_to_linear(snr_db).sqrt()
}

/// Standard normal tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Hard-decision uncoded OOK error rate, `Q(sqrt(SNR))`.
pub fn uncoded_ber(snr_db: f64) -> f64 {
    q_function(db_to_linear(snr_db).sqrt())
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate <= 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "code rate must lie in (0, 1], got {rate}"
        )))
    }
}

/// `SNR = R_c * Eb/N0`, in dB.
pub fn ebn0_to_snr(ebn0_db: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    Ok(ebn0_db + linear_to_db(rate))
}

pub fn snr_to_ebn0(snr_db: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    Ok(snr_db - linear_to_db(rate))
}

/// Operating point of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub snr_db: f64,
    /// Code rate, used only for Eb/N0 conversion.
    pub rate: f64,
    pub seed: u64,
}

impl ChannelParams {
    pub fn new(snr_db: f64, rate: f64, seed: u64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::Parameter(format!(
                "snr must be finite, got {snr_db}"
            )));
        }
        check_rate(rate)?;
        Ok(Self { snr_db, rate, seed })
    }

    pub fn noise_sigma(&self) -> f64 {
        snr_to_sigma(self.snr_db)
    }

    pub fn ebn0_db(&self) -> f64 {
        self.snr_db - linear_to_db(self.rate)
    }
}

/// A seeded noise source. Not meant to be shared mid-stream; give each
/// worker its own instance.
#[derive(Debug, Clone)]
pub struct AwgnChannel {
    params: ChannelParams,
    sigma: f64,
    rng: ChaCha8Rng,
}

impl AwgnChannel {
    pub fn new(params: ChannelParams) -> Self {
        Self::with_rng(params, ChaCha8Rng::seed_from_u64(params.seed))
    }

    /// Uses a caller-provided generator instead of seeding from `params`.
    pub fn with_rng(params: ChannelParams, rng: ChaCha8Rng) -> Self {
        Self {
            sigma: params.noise_sigma(),
            params,
            rng,
        }
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `sample_i = A * bit_i + N(0, sigma^2)`.
    pub fn transmit(&mut self, frame: &[u8]) -> Vec<f64> {
        frame
            .iter()
            .map(|&b| {
                let noise: f64 = self.rng.sample(StandardNormal);
                AMPLITUDE * f64::from(b) + self.sigma * noise
            })
            .collect()
    }

    /// LLRs for received samples at this channel's noise level.
    pub fn demodulate(&self, samples: &[f64]) -> Result<LlrBlock> {
        demodulate_llr(samples, self.sigma)
    }
}

/// Exact per-symbol LLR, `(A^2 - 2 A s) / (2 sigma^2)`.
pub fn demodulate_llr(samples: &[f64], sigma: f64) -> Result<LlrBlock> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Parameter(format!(
            "noise sigma must be positive, got {sigma}"
        )));
    }
    let scale = 1.0 / (2.0 * sigma * sigma);
    LlrBlock::new(
        samples
            .iter()
            .map(|&s| (AMPLITUDE * AMPLITUDE - 2.0 * AMPLITUDE * s) * scale)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::hard_decision;

    #[test]
    fn sigma_calibration() {
        assert_eq!(snr_to_sigma(0.0), 0.5);
        assert!((snr_to_sigma(linear_to_db(9.0)) - 0.5 / 3.0).abs() < 1e-15);
        assert!(snr_to_sigma(200.0) < 1e-9);
    }

    #[test]
    fn q_values() {
        let q1 = q_function(1.0);
        assert!((q1 - 0.158_655_253_931_457_07).abs() < 1e-12, "{q1}");
        assert!((q_function(3.0) - 1.349_898_031_630_09e-3).abs() < 1e-14);
        assert!((uncoded_ber(0.0) - q_function(1.0)).abs() < 1e-15);
        assert!(uncoded_ber(30.0) < 1e-200);
    }

    #[test]
    fn ebn0_conversion() {
        assert!((ebn0_to_snr(7.9, 0.5).unwrap() - 4.889_700_043_360_188).abs() < 1e-12);
        assert_eq!(ebn0_to_snr(3.3, 1.0).unwrap(), 3.3);
        assert!((ebn0_to_snr(10.0, 0.25).unwrap() - 3.979_400_086_720_376).abs() < 1e-12);
        assert!(ebn0_to_snr(1.0, 0.0).is_err());
        assert!(ebn0_to_snr(1.0, 1.5).is_err());
        let back = snr_to_ebn0(ebn0_to_snr(6.0, 0.75).unwrap(), 0.75).unwrap();
        assert!((back - 6.0).abs() < 1e-12);
    }

    #[test]
    fn llr_spot_values() {
        let l = demodulate_llr(&[0.8, 0.5, 1.0, 0.0], 0.5).unwrap();
        assert!((l[0] + 1.2).abs() < 1e-12);
        assert_eq!(l[1], 0.0);
        assert!((l[2] + 2.0).abs() < 1e-12);
        assert!((l[3] - 2.0).abs() < 1e-12);
        let strong = demodulate_llr(&[1.0], 0.01).unwrap();
        assert!(strong[0] <= -39.0);
        assert!(demodulate_llr(&[1.0], 0.0).is_err());
    }

    #[test]
    fn llr_agrees_with_threshold() {
        let samples: Vec<f64> = (-200..=400).map(|i| i as f64 / 200.0).collect();
        let llrs = demodulate_llr(&samples, 0.3).unwrap();
        for (s, l) in samples.iter().zip(llrs.iter()) {
            let threshold_bit = u8::from(*s > AMPLITUDE / 2.0);
            assert_eq!(hard_decision(*l), threshold_bit, "sample {s}");
        }
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let params = ChannelParams::new(3.0, 0.5, 99).unwrap();
        let frame = vec![1u8, 0, 1, 1, 0];
        let a = AwgnChannel::new(params).transmit(&frame);
        let b = AwgnChannel::new(params).transmit(&frame);
        assert_eq!(a, b);
        let c = AwgnChannel::new(ChannelParams {
            seed: 100,
            ..params
        })
        .transmit(&frame);
        assert_ne!(a, c);
    }

    #[test]
    fn negligible_noise_returns_amplitudes() {
        let params = ChannelParams::new(300.0, 1.0, 1).unwrap();
        let frame = vec![1u8, 0, 0, 1];
        let out = AwgnChannel::new(params).transmit(&frame);
        for (o, &b) in out.iter().zip(&frame) {
            assert!((o - f64::from(b)).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_mean_of_ones() {
        let params = ChannelParams::new(0.0, 1.0, 5).unwrap();
        let mut ch = AwgnChannel::new(params);
        let len = 100_000;
        let out = ch.transmit(&vec![1u8; len]);
        let mean = out.iter().sum::<f64>() / len as f64;
        assert!((mean - AMPLITUDE).abs() < 3.0 * ch.sigma() / (len as f64).sqrt());
    }

    #[test]
    fn params_validation() {
        assert!(ChannelParams::new(f64::INFINITY, 0.5, 0).is_err());
        assert!(ChannelParams::new(1.0, 0.0, 0).is_err());
        let p = ChannelParams::new(4.9, 0.5, 0).unwrap();
        assert!((p.ebn0_db() - 7.910_299_956_639_812).abs() < 1e-12);
    }
}
