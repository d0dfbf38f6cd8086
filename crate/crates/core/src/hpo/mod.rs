//! Launch-power optimisation: span capacity objective, flat-launch and
//! flat-received scans, and the network-wide wrappers.

mod capacity;
mod network;
mod span;

pub use capacity::span_total_capacity;
pub use network::{
    gon_sweep, optimize_network_powers, representative_span, GonRow, NetworkPowers, NetworkScenario, ScenarioResult,
    TARGET_BBP,
};
pub use span::{
    logo_reference_power, optimize_span_power, BandStats, HpoConfig, HpoResult, LaunchMode, ProfileStats, SpanOptimizer,
};
