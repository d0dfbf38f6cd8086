//! Physical-layer domain types: band plans, channel grids, tabulated fiber
//! profiles, Raman gain and amplifiers.

mod amplifier;
mod band;
mod fiber;
mod raman;
mod span;
mod table;

pub use amplifier::{AmplifierSpec, Amplifiers};
pub use band::{build_channel_grid, Band, BandName, BandPlan, Channel, ChannelGrid};
pub use fiber::FiberSpec;
pub use raman::RamanProfile;
pub use span::SpanSpec;
pub use table::SampledProfile;
