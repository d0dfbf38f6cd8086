//! Quality-of-transmission estimation: ASE and NLI noise, per-span and
//! end-to-end GSNR, and the transceiver rate ladder.

mod lightpath;
mod nli;
mod noise;
mod span;
mod transceiver;

pub use lightpath::{combine_inverse_gsnr, lightpath_gsnr, PenaltyConfig};
pub use nli::{IncoherentGn, NliCoefficients, NliEstimator};
pub use noise::{amplifier_gains, ase_power, AmplifierGains};
pub use span::{analyze_span, span_gsnr, SpanAnalysis, SpanNoiseBreakdown};
pub use transceiver::{channel_bandwidth_and_rate, modulation_from_gsnr, TransceiverSpec, MAX_CARDINALITY};
