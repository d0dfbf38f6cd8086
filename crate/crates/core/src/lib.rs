//! Planning toolkit for multi-band (L+C+S) elastic optical networks.
//!
//! The crate is layered bottom-up:
//!
//! * [`physics`] – band plans, channel grids and tabulated fiber profiles.
//! * [`pep`] – ISRS power evolution along a span and the effective-loss fit.
//! * [`qot`] – ASE/NLI noise, span and lightpath GSNR, transceiver ladder.
//! * [`hpo`] – flat-launch / flat-received power optimisation per span and
//!   network-wide.
//! * [`network`] – topologies, k-shortest paths, demand generation and the
//!   channel-connection capacity tables.
//! * [`sim`] – semi-static provisioning with Flexponder grooming and
//!   blocking-probability accounting.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hpo;
pub mod network;
pub mod pep;
pub mod physics;
pub mod qot;
pub mod report;
pub mod sim;
pub mod units;

pub use error::{Error, Result};
pub use pep::{Direction, FittedLossModel, LaunchProfile, PowerEvolutionProfile};
pub use physics::{BandName, BandPlan, ChannelGrid, FiberSpec, SpanSpec};
pub use qot::{PenaltyConfig, SpanNoiseBreakdown, TransceiverSpec};
