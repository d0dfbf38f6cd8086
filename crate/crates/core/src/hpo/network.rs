use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::network::{precompute_ccr, CcrInputs, CcrTable, Topology};
use crate::pep::LaunchProfile;
use crate::physics::{Amplifiers, ChannelGrid, FiberSpec, SpanSpec};
use crate::qot::{PenaltyConfig, TransceiverSpec};
use crate::sim::{load_curve, run_seeds, throughput_at_bbp, CurveRow, SimConfig};

use super::{HpoConfig, HpoResult, LaunchMode, SpanOptimizer};

/// Per-link optimisation results, indexed like `Topology::links`.
#[derive(Debug, Clone, Serialize)]
pub struct NetworkPowers {
    pub mode: LaunchMode,
    pub per_link: Vec<HpoResult>,
}

impl NetworkPowers {
    pub fn launches(&self) -> Vec<LaunchProfile> {
        self.per_link.iter().map(|r| r.launch.clone()).collect()
    }
}

/// Span standing in for every span of a link: the average span length, the
/// link's amplifiers and the expected lumped loss for that length.
pub fn representative_span(topo: &Topology, link: usize, fiber: Arc<FiberSpec>, penalties: &PenaltyConfig) -> SpanSpec {
    let l = topo.link(link);
    let length = l.average_span_km();
    SpanSpec::new(length, fiber)
        .with_amplifiers(l.amplifiers.clone())
        .with_lumped_loss_db(penalties.mean_lumped_loss_db(length))
}

/// Optimises each link on its representative span. Links sharing span length
/// and amplifiers share one optimisation.
pub fn optimize_network_powers(
    topo: &Topology,
    grid: &ChannelGrid,
    fiber: Arc<FiberSpec>,
    trx: &TransceiverSpec,
    penalties: &PenaltyConfig,
    cfg: &HpoConfig,
) -> Result<NetworkPowers> {
    let mut keys: Vec<(u64, Amplifiers)> = Vec::new();
    let mut slot = Vec::with_capacity(topo.links().len());
    for l in topo.links() {
        let key = (l.average_span_km().to_bits(), l.amplifiers.clone());
        let k = match keys.iter().position(|x| *x == key) {
            Some(k) => k,
            None => {
                keys.push(key);
                keys.len() - 1
            }
        };
        slot.push(k);
    }
    let first_link: Vec<usize> =
        (0..keys.len()).map(|k| slot.iter().position(|&s| s == k).expect("every key has a link")).collect();
    let unique: Vec<HpoResult> = first_link
        .par_iter()
        .map(|&li| {
            let span = representative_span(topo, li, fiber.clone(), penalties);
            SpanOptimizer::new(&span, grid, trx)?.optimize(cfg)
        })
        .collect::<Result<_>>()?;
    Ok(NetworkPowers { mode: cfg.mode, per_link: slot.into_iter().map(|k| unique[k].clone()).collect() })
}

/// Everything needed to turn per-link launch profiles into blocking curves.
pub struct NetworkScenario<'a> {
    pub topo: &'a Topology,
    pub grid: &'a ChannelGrid,
    pub fiber: Arc<FiberSpec>,
    pub trx: &'a TransceiverSpec,
    pub penalties: &'a PenaltyConfig,
    pub k_paths: usize,
    pub pep_step_m: f64,
    pub sim: SimConfig,
    pub demand_count: usize,
    pub seeds: Vec<u64>,
}

/// Outcome of one network configuration.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub ccr: CcrTable,
    pub curve: Vec<CurveRow>,
    /// Offered load at 1% mean BBP, Gb/s.
    pub throughput_gbps: Option<f64>,
}

pub const TARGET_BBP: f64 = 0.01;

impl NetworkScenario<'_> {
    pub fn ccr(&self, launches: &[LaunchProfile]) -> Result<CcrTable> {
        let mut inputs =
            CcrInputs::new(self.topo, self.grid, self.fiber.clone(), self.trx, self.penalties, launches, self.k_paths);
        inputs.pep_step_m = self.pep_step_m;
        precompute_ccr(&inputs)
    }

    pub fn simulate(&self, ccr: CcrTable) -> Result<ScenarioResult> {
        let outcomes = run_seeds(self.topo, self.grid, &ccr, self.trx, &self.sim, self.demand_count, &self.seeds)?;
        let curve = load_curve(&outcomes);
        let throughput_gbps = throughput_at_bbp(&curve, TARGET_BBP);
        Ok(ScenarioResult { ccr, curve, throughput_gbps })
    }

    pub fn evaluate(&self, launches: &[LaunchProfile]) -> Result<ScenarioResult> {
        self.simulate(self.ccr(launches)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GonRow {
    pub power_dbm: f64,
    pub throughput_gbps: Option<f64>,
    pub final_bbp_mean: f64,
    pub lci_count_mean: f64,
    pub gsnr_mean_db: f64,
}

/// Evaluates a uniform flat launch power on every span for each entry of
/// `powers_dbm`.
pub fn gon_sweep(scenario: &NetworkScenario<'_>, powers_dbm: &[f64]) -> Result<Vec<GonRow>> {
    powers_dbm
        .iter()
        .map(|&p| {
            let launches = vec![LaunchProfile::flat_dbm(scenario.grid.len(), p); scenario.topo.links().len()];
            let res = scenario.evaluate(&launches)?;
            let last = res.curve.last();
            Ok(GonRow {
                power_dbm: p,
                throughput_gbps: res.throughput_gbps,
                final_bbp_mean: last.map_or(0.0, |r| r.bbp_mean),
                lci_count_mean: last.map_or(0.0, |r| r.lci_count_mean),
                gsnr_mean_db: last.map_or(f64::NAN, |r| r.gsnr_mean_db),
            })
        })
        .collect()
}
