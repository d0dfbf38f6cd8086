use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

use super::Topology;

pub const RATE_STEP_BPS: f64 = 100e9;
pub const MAX_RATE_STEPS: u32 = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Demand {
    pub id: usize,
    /// Node index; `id(source) < id(destination)`.
    pub source: usize,
    pub destination: usize,
    pub rate_bps: f64,
}

/// Node weight used for pair selection: population times nodal degree.
pub fn node_weight(topo: &Topology, node: usize) -> f64 {
    topo.node(node).population * topo.degree(node) as f64
}

/// Draws `count` demands between distinct core nodes. A pair is chosen with
/// probability proportional to the product of its node weights; the rate is
/// uniform over 100..=600 Gb/s in 100 Gb/s steps.
pub fn generate_demand_sequence(topo: &Topology, seed: u64, count: usize) -> Result<Vec<Demand>> {
    let pairs = topo.core_pairs();
    if pairs.is_empty() {
        return Err(Error::TooFewCoreNodes(topo.core_nodes().count()));
    }
    let weights: Vec<f64> = pairs.iter().map(|&(s, d)| node_weight(topo, s) * node_weight(topo, d)).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(format!("demand weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|id| {
            let (source, destination) = pairs[dist.sample(&mut rng)];
            let steps = rng.gen_range(1..=MAX_RATE_STEPS);
            Demand { id, source, destination, rate_bps: steps as f64 * RATE_STEP_BPS }
        })
        .collect())
}
