use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{CcrConnection, CcrPath, CcrTable, Demand};
use crate::physics::ChannelGrid;
use crate::qot::{TransceiverSpec, MAX_CARDINALITY};

use super::{effective_cardinalities, ModulationPolicy, PathPolicy, SpectrumState};

/// Line-card interface: one channel on one path between two add/drop nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LciRecord {
    pub id: usize,
    pub source: usize,
    pub destination: usize,
    pub path_idx: usize,
    pub channel: usize,
    pub cardinality: u8,
    pub capacity_mbps: u64,
    pub committed_mbps: u64,
    pub gsnr_db: f64,
}

impl LciRecord {
    pub fn spare_mbps(&self) -> u64 {
        self.capacity_mbps - self.committed_mbps
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewLci {
    pub channel: usize,
    pub cardinality: u8,
    pub committed_mbps: u64,
}

/// How a demand would be carried on one candidate path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementPlan {
    pub path_idx: usize,
    /// `(lci id, Mb/s taken from its spare capacity)`
    pub groomed: Vec<(usize, u64)>,
    pub new_lcis: Vec<NewLci>,
}

impl PlacementPlan {
    /// Minimum GSNR over the new LCIs; `+∞` for a groomed-only plan.
    pub fn min_new_gsnr_db(&self, path: &CcrPath) -> f64 {
        self.new_lcis.iter().map(|n| path.gsnr_db[n.channel]).fold(f64::INFINITY, f64::min)
    }

    /// Highest channel index of the new LCIs; `None` for a groomed-only plan.
    pub fn max_new_channel(&self) -> Option<usize> {
        self.new_lcis.iter().map(|n| n.channel).max()
    }
}

/// Spectrum plus deployed LCIs.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub spectrum: SpectrumState,
    pub lcis: Vec<LciRecord>,
    by_route: BTreeMap<(usize, usize, usize), Vec<usize>>,
}

impl NetworkState {
    pub fn new(n_links: usize, n_channels: usize) -> Self {
        NetworkState { spectrum: SpectrumState::new(n_links, n_channels), lcis: Vec::new(), by_route: BTreeMap::new() }
    }

    /// LCIs of `(source, destination, path)`, ascending channel.
    pub fn route_lcis(&self, source: usize, destination: usize, path_idx: usize) -> impl Iterator<Item = &LciRecord> {
        self.by_route.get(&(source, destination, path_idx)).into_iter().flatten().map(|&id| &self.lcis[id])
    }

    fn commit(&mut self, demand: &Demand, plan: &PlacementPlan, path: &CcrPath, mbps_per_m: u64) {
        for &(id, mbps) in &plan.groomed {
            self.lcis[id].committed_mbps += mbps;
        }
        for n in &plan.new_lcis {
            let ok = self.spectrum.occupy(&path.path.links, n.channel);
            debug_assert!(ok, "plan placed on an occupied channel");
            let id = self.lcis.len();
            self.lcis.push(LciRecord {
                id,
                source: demand.source,
                destination: demand.destination,
                path_idx: plan.path_idx,
                channel: n.channel,
                cardinality: n.cardinality,
                capacity_mbps: n.cardinality as u64 * mbps_per_m,
                committed_mbps: n.committed_mbps,
                gsnr_db: path.gsnr_db[n.channel],
            });
            let route = self.by_route.entry((demand.source, demand.destination, plan.path_idx)).or_default();
            route.push(id);
            let lcis = &self.lcis;
            route.sort_by_key(|&k| lcis[k].channel);
        }
    }
}

fn mbps_per_cardinality(trx: &TransceiverSpec) -> u64 {
    (trx.rate_per_cardinality_bps / 1e6).round() as u64
}

fn demand_mbps(d: &Demand) -> u64 {
    (d.rate_bps / 1e6).round() as u64
}

/// Plans `demand` on one path: spare capacity of existing LCIs on the same
/// route first, then new LCIs on the lowest free usable channels.
pub fn groom_and_place(
    demand: &Demand,
    path_idx: usize,
    path: &CcrPath,
    cardinalities: &[u8],
    state: &NetworkState,
    grooming: bool,
    trx: &TransceiverSpec,
) -> Option<PlacementPlan> {
    let per_m = mbps_per_cardinality(trx);
    let mut residual = demand_mbps(demand);
    let mut plan = PlacementPlan { path_idx, groomed: Vec::new(), new_lcis: Vec::new() };
    if grooming {
        for lci in state.route_lcis(demand.source, demand.destination, path_idx) {
            if residual == 0 {
                break;
            }
            let take = lci.spare_mbps().min(residual);
            if take > 0 {
                plan.groomed.push((lci.id, take));
                residual -= take;
            }
        }
    }
    for (ch, &m) in cardinalities.iter().enumerate() {
        if residual == 0 {
            break;
        }
        if m == 0 || !state.spectrum.is_free_on(&path.path.links, ch) {
            continue;
        }
        let take = (m as u64 * per_m).min(residual);
        plan.new_lcis.push(NewLci { channel: ch, cardinality: m, committed_mbps: take });
        residual -= take;
    }
    (residual == 0).then_some(plan)
}

/// Best feasible plan over the candidate paths of a connection.
/// Ties go to the shorter path, then the lower path index.
#[allow(clippy::too_many_arguments)]
pub fn select_path(
    policy: PathPolicy,
    connection: &CcrConnection,
    cardinalities: &[Vec<u8>],
    state: &NetworkState,
    demand: &Demand,
    grooming: bool,
    trx: &TransceiverSpec,
) -> Option<PlacementPlan> {
    let mut best: Option<(PlacementPlan, f64)> = None;
    for (k, path) in connection.paths.iter().enumerate() {
        let Some(plan) = groom_and_place(demand, k, path, &cardinalities[k], state, grooming, trx) else {
            continue;
        };
        // larger is better
        let score = match policy {
            PathPolicy::MaxMinGf => plan.min_new_gsnr_db(path),
            PathPolicy::MinMaxF => plan.max_new_channel().map_or(1.0, |c| -(c as f64)),
        };
        let better = match &best {
            None => true,
            Some((b, s)) => {
                score > *s || (score == *s && path.path.length_km < connection.paths[b.path_idx].path.length_km)
            }
        };
        if better {
            best = Some((plan, score));
        }
    }
    best.map(|(p, _)| p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub path_policy: PathPolicy,
    pub modulation_policy: ModulationPolicy,
    pub grooming: bool,
    /// Demands between load checkpoints.
    pub checkpoint_every: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            path_policy: PathPolicy::MaxMinGf,
            modulation_policy: ModulationPolicy::Cbg,
            grooming: true,
            checkpoint_every: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimMetrics {
    pub demands: usize,
    pub offered_bps: f64,
    pub placed_bps: f64,
    pub blocked_bps: f64,
    pub bbp: f64,
    pub lci_count: usize,
    /// Mean GSNR over established LCIs, dB; NaN with no LCIs.
    pub mean_gsnr_db: f64,
    /// LCIs per cardinality, index `m`.
    pub cardinality_histogram: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventAction {
    Placed,
    Blocked,
}

/// One admission decision, for the JSON-lines audit log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub demand_id: usize,
    pub action: EventAction,
    pub path_idx: Option<usize>,
    pub rate_gbps: f64,
    pub groomed_lcis: Vec<usize>,
    pub channels: Vec<usize>,
    pub m: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub metrics: SimMetrics,
    pub checkpoints: Vec<SimMetrics>,
    pub events: Vec<Event>,
    pub state: NetworkState,
}

struct Accounting {
    offered: u64,
    placed: u64,
    blocked: u64,
}

fn snapshot(acc: &Accounting, demands: usize, state: &NetworkState) -> SimMetrics {
    let mut hist = vec![0; MAX_CARDINALITY as usize + 1];
    for l in &state.lcis {
        hist[l.cardinality as usize] += 1;
    }
    let n = state.lcis.len();
    SimMetrics {
        demands,
        offered_bps: acc.offered as f64 * 1e6,
        placed_bps: acc.placed as f64 * 1e6,
        blocked_bps: acc.blocked as f64 * 1e6,
        bbp: if acc.offered == 0 { 0.0 } else { acc.blocked as f64 / acc.offered as f64 },
        lci_count: n,
        mean_gsnr_db: state.lcis.iter().map(|l| l.gsnr_db).sum::<f64>() / n as f64,
        cardinality_histogram: hist,
    }
}

/// Admits `demands` in order with no departures. Blocked demands are not
/// retried.
pub fn run_simulation(
    ccr: &CcrTable,
    grid: &ChannelGrid,
    n_links: usize,
    trx: &TransceiverSpec,
    demands: &[Demand],
    cfg: &SimConfig,
) -> SimOutcome {
    let mut cardinalities: BTreeMap<(usize, usize), Vec<Vec<u8>>> = BTreeMap::new();
    for c in &ccr.connections {
        let per_path = c.paths.iter().map(|p| effective_cardinalities(cfg.modulation_policy, p, grid, trx)).collect();
        cardinalities.insert((c.source, c.destination), per_path);
    }

    let per_m = mbps_per_cardinality(trx);
    let mut state = NetworkState::new(n_links, grid.len());
    let mut acc = Accounting { offered: 0, placed: 0, blocked: 0 };
    let mut checkpoints = Vec::new();
    let mut events = Vec::with_capacity(demands.len());
    let every = cfg.checkpoint_every.max(1);

    for (k, d) in demands.iter().enumerate() {
        let rate = demand_mbps(d);
        acc.offered += rate;
        let plan = ccr.connection(d.source, d.destination).and_then(|conn| {
            let card = &cardinalities[&(conn.source, conn.destination)];
            select_path(cfg.path_policy, conn, card, &state, d, cfg.grooming, trx).map(|p| (conn, p))
        });
        match plan {
            Some((conn, plan)) => {
                let path = &conn.paths[plan.path_idx];
                state.commit(d, &plan, path, per_m);
                acc.placed += rate;
                events.push(Event {
                    demand_id: d.id,
                    action: EventAction::Placed,
                    path_idx: Some(plan.path_idx),
                    rate_gbps: d.rate_bps / 1e9,
                    groomed_lcis: plan.groomed.iter().map(|g| g.0).collect(),
                    channels: plan.new_lcis.iter().map(|n| n.channel).collect(),
                    m: plan.new_lcis.iter().map(|n| n.cardinality).collect(),
                });
            }
            None => {
                acc.blocked += rate;
                events.push(Event {
                    demand_id: d.id,
                    action: EventAction::Blocked,
                    path_idx: None,
                    rate_gbps: d.rate_bps / 1e9,
                    groomed_lcis: Vec::new(),
                    channels: Vec::new(),
                    m: Vec::new(),
                });
            }
        }
        if (k + 1) % every == 0 || k + 1 == demands.len() {
            checkpoints.push(snapshot(&acc, k + 1, &state));
        }
    }
    SimOutcome { metrics: snapshot(&acc, demands.len(), &state), checkpoints, events, state }
}

/// Rebuilds occupancy from the LCI list and checks it against the recorded
/// spectrum, continuity and capacity bounds.
pub fn audit(outcome: &SimOutcome, ccr: &CcrTable, trx: &TransceiverSpec) -> Result<()> {
    let state = &outcome.state;
    let mut rebuilt = SpectrumState::new(state.spectrum.n_links(), state.spectrum.n_channels());
    let per_m = mbps_per_cardinality(trx);
    let fail = |msg: String| Err(Error::InvalidParameter(format!("audit: {msg}")));
    for l in &state.lcis {
        let Some(conn) = ccr.connection(l.source, l.destination) else {
            return fail(format!("LCI {} has no connection", l.id));
        };
        let Some(path) = conn.paths.get(l.path_idx) else {
            return fail(format!("LCI {} refers to missing path {}", l.id, l.path_idx));
        };
        if !rebuilt.occupy(&path.path.links, l.channel) {
            return fail(format!("channel {} double-booked by LCI {}", l.channel, l.id));
        }
        if l.cardinality == 0 || l.capacity_mbps != l.cardinality as u64 * per_m {
            return fail(format!("LCI {} capacity inconsistent with m = {}", l.id, l.cardinality));
        }
        if l.committed_mbps > l.capacity_mbps || l.committed_mbps == 0 {
            return fail(format!("LCI {} commits {} of {} Mb/s", l.id, l.committed_mbps, l.capacity_mbps));
        }
    }
    if rebuilt != state.spectrum {
        return fail("occupancy differs from the LCI list".into());
    }
    let m = &outcome.metrics;
    let committed: u64 = state.lcis.iter().map(|l| l.committed_mbps).sum();
    if (committed as f64 * 1e6 - m.placed_bps).abs() > 0.5 || (m.offered_bps - m.placed_bps - m.blocked_bps).abs() > 0.5
    {
        return fail("offered, placed and blocked traffic do not balance".into());
    }
    Ok(())
}

pub fn write_events_jsonl<W: Write>(events: &[Event], mut out: W) -> Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n").map_err(|err| Error::io("<events>", err))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::CandidatePath;
    use crate::physics::{build_channel_grid, BandPlan};
    use crate::qot::modulation_from_gsnr;

    fn conn(paths: Vec<(Vec<usize>, f64, Vec<f64>)>) -> CcrConnection {
        let trx = TransceiverSpec::default();
        CcrConnection {
            source: 0,
            destination: 1,
            paths: paths
                .into_iter()
                .map(|(links, length_km, gsnr_db)| CcrPath {
                    path: CandidatePath { nodes: vec![0, 1], links, length_km, roadm_hops: 2 },
                    cardinality: gsnr_db.iter().map(|&g| modulation_from_gsnr(g, &trx)).collect(),
                    gsnr_db,
                })
                .collect(),
        }
    }

    fn demand(id: usize, gbps: f64) -> Demand {
        Demand { id, source: 0, destination: 1, rate_bps: gbps * 1e9 }
    }

    #[test]
    fn fig3_split_across_two_lcis() {
        let trx = TransceiverSpec::default();
        let c = conn(vec![(vec![0], 80.0, vec![20.0; 4])]);
        let state = NetworkState::new(1, 4);
        let plan =
            groom_and_place(&demand(0, 1100.0), 0, &c.paths[0], &c.paths[0].cardinality, &state, true, &trx).unwrap();
        assert_eq!(plan.new_lcis.len(), 2);
        assert_eq!(plan.new_lcis[0].committed_mbps, 600_000);
        assert_eq!(plan.new_lcis[1].committed_mbps, 500_000);

        let ccr = CcrTable::new(4, vec![c]);
        let grid =
            ChannelGrid::from_channels(build_channel_grid(&BandPlan::c_only()).unwrap().channels()[..4].to_vec(), 75e9)
                .unwrap();
        let out = run_simulation(&ccr, &grid, 1, &trx, &[demand(0, 1100.0), demand(1, 100.0)], &SimConfig::default());
        assert_eq!(out.metrics.lci_count, 2);
        assert_eq!(out.state.lcis[1].spare_mbps(), 0);
        assert_eq!(out.events[1].groomed_lcis, vec![1]);
        assert!(out.events[1].channels.is_empty());
        audit(&out, &ccr, &trx).unwrap();
    }

    #[test]
    fn unusable_path_is_infeasible() {
        let trx = TransceiverSpec::default();
        let c = conn(vec![(vec![0], 80.0, vec![2.0; 4])]);
        let state = NetworkState::new(1, 4);
        assert!(
            groom_and_place(&demand(0, 100.0), 0, &c.paths[0], &c.paths[0].cardinality, &state, true, &trx).is_none()
        );
    }

    #[test]
    fn path_policies() {
        let trx = TransceiverSpec::default();
        // path 0: 15 dB everywhere; path 1: 17 dB but low channels taken
        let c = conn(vec![(vec![0], 80.0, vec![15.0; 12]), (vec![1], 90.0, vec![17.0; 12])]);
        let mut state = NetworkState::new(2, 12);
        for ch in 0..4 {
            state.spectrum.occupy(&[1], ch);
        }
        let card: Vec<Vec<u8>> = c.paths.iter().map(|p| p.cardinality.clone()).collect();
        let d = demand(0, 100.0);
        let a = select_path(PathPolicy::MaxMinGf, &c, &card, &state, &d, true, &trx).unwrap();
        assert_eq!(a.path_idx, 1);
        let b = select_path(PathPolicy::MinMaxF, &c, &card, &state, &d, true, &trx).unwrap();
        assert_eq!(b.path_idx, 0);

        // identical scores → shorter path
        let tie = conn(vec![(vec![0], 90.0, vec![15.0; 4]), (vec![1], 80.0, vec![15.0; 4])]);
        let card: Vec<Vec<u8>> = tie.paths.iter().map(|p| p.cardinality.clone()).collect();
        let state = NetworkState::new(2, 4);
        for policy in [PathPolicy::MaxMinGf, PathPolicy::MinMaxF] {
            assert_eq!(select_path(policy, &tie, &card, &state, &d, true, &trx).unwrap().path_idx, 1);
        }
    }

    #[test]
    fn single_feasible_candidate_chosen() {
        let trx = TransceiverSpec::default();
        let c = conn(vec![(vec![0], 80.0, vec![1.0; 4]), (vec![1], 90.0, vec![10.0; 4])]);
        let card: Vec<Vec<u8>> = c.paths.iter().map(|p| p.cardinality.clone()).collect();
        let state = NetworkState::new(2, 4);
        for policy in [PathPolicy::MaxMinGf, PathPolicy::MinMaxF] {
            assert_eq!(select_path(policy, &c, &card, &state, &demand(0, 100.0), true, &trx).unwrap().path_idx, 1);
        }
    }

    #[test]
    fn empty_and_hopeless_runs() {
        let trx = TransceiverSpec::default();
        let grid = build_channel_grid(&BandPlan::c_only()).unwrap();
        let c = conn(vec![(vec![0], 80.0, vec![1.0; grid.len()])]);
        let ccr = CcrTable::new(grid.len(), vec![c]);
        let out = run_simulation(&ccr, &grid, 1, &trx, &[], &SimConfig::default());
        assert_eq!(out.metrics.bbp, 0.0);
        assert_eq!(out.metrics.lci_count, 0);
        let out = run_simulation(&ccr, &grid, 1, &trx, &[demand(0, 300.0)], &SimConfig::default());
        assert_eq!(out.metrics.bbp, 1.0);
        assert_eq!(out.events[0].action, EventAction::Blocked);
        let mut buf = Vec::new();
        write_events_jsonl(&out.events, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("\"action\":\"blocked\""));
    }
}
