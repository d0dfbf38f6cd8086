//! Topologies, candidate paths, demand generation and channel-connection
//! capacity tables.

mod ccr;
mod demand;
mod paths;
mod topology;

pub use ccr::{precompute_ccr, CcrConnection, CcrInputs, CcrPath, CcrTable};
pub use demand::{generate_demand_sequence, node_weight, Demand, MAX_RATE_STEPS, RATE_STEP_BPS};
pub use paths::{k_shortest_paths, CandidatePath};
pub use topology::{
    load_topology, random_topology, FiberSpan, Link, LinkRecord, Node, NodeRecord, RandomTopologyParams, Topology,
    TopologyFile, FIXTURE_6NODE, SPAN_SUM_TOLERANCE_KM,
};
