//! Polar-coded, dimming-compensated OOK links for visible light
//! communication.
//!
//! The transmit chain is
//! [`encode`] → [`assemble_frame`] → [`InterleaverMap::apply`] →
//! [`AwgnChannel::transmit`]; the receiver runs
//! [`AwgnChannel::demodulate`] → [`InterleaverMap::invert`] →
//! [`codeword_region`] → [`ScDecoder::decode`].

pub mod bits;
pub mod channel;
pub mod codec;
pub mod construct;
pub mod error;
pub mod frame;
pub mod metrics;

pub use bits::{hard_decision, BitBlock, LlrBlock, LLR_CLAMP};
pub use channel::{
    demodulate_llr, ebn0_to_snr, q_function, snr_to_ebn0, snr_to_sigma, uncoded_ber, AwgnChannel,
    ChannelParams,
};
pub use codec::{decode, encode, OpCount, ScDecoder};
pub use construct::{
    compute_reliability, select_info_set, CodeSpec, ReliabilityProfile, DEFAULT_DESIGN_Z,
};
pub use error::{Error, Result};
pub use frame::{
    assemble_frame, codeword_region, deinterleave, disassemble_frame, interleave, plan_dimming,
    run_length_histogram, DimmingPlan, InterleaverMap, InterleaverSpec,
};
pub use metrics::{
    efficiency_table, summarize_ber, BerSummary, EfficiencyRow, RunLengthHistogram, Scheme,
    TrialLedger, WeightHistogram,
};
