//! Shared fixtures for the criterion benchmarks.

use std::sync::Arc;

use mbplan_core::network::{precompute_ccr, CcrInputs, CcrTable, Topology, FIXTURE_6NODE};
use mbplan_core::physics::{build_channel_grid, BandPlan, ChannelGrid, FiberSpec};
use mbplan_core::{LaunchProfile, PenaltyConfig, TransceiverSpec};

pub fn lcs_grid() -> ChannelGrid {
    build_channel_grid(&BandPlan::lcs()).expect("bundled band plan")
}

pub fn ssmf() -> Arc<FiberSpec> {
    Arc::new(FiberSpec::ssmf_default())
}

/// Six-node fixture with a C-band CCR at a flat 0 dBm launch.
pub struct SimFixture {
    pub topo: Topology,
    pub grid: ChannelGrid,
    pub trx: TransceiverSpec,
    pub ccr: CcrTable,
}

pub fn sim_fixture() -> SimFixture {
    let pen = PenaltyConfig::default();
    let topo = Topology::from_json_str(FIXTURE_6NODE, &pen, 1).expect("bundled fixture");
    let grid = build_channel_grid(&BandPlan::c_only()).expect("bundled band plan");
    let trx = TransceiverSpec::default();
    let launches = vec![LaunchProfile::flat_dbm(grid.len(), 0.0); topo.links().len()];
    let mut inputs = CcrInputs::new(&topo, &grid, ssmf(), &trx, &pen, &launches, 3);
    inputs.pep_step_m = 500.0;
    let ccr = precompute_ccr(&inputs).expect("fixture CCR");
    SimFixture { topo, grid, trx, ccr }
}
