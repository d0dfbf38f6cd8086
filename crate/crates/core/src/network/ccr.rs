use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pep::{Direction, LaunchProfile, PepSolver, DEFAULT_STEP_M};
use crate::physics::{ChannelGrid, FiberSpec, SpanSpec};
use crate::qot::{
    analyze_span, combine_inverse_gsnr, modulation_from_gsnr, span_gsnr, IncoherentGn, NliEstimator, PenaltyConfig,
    SpanAnalysis, TransceiverSpec,
};
use crate::report::sig6;

use super::{k_shortest_paths, CandidatePath, Topology};

/// GSNR and cardinality of every channel along one candidate path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CcrPath {
    pub path: CandidatePath,
    pub gsnr_db: Vec<f64>,
    pub cardinality: Vec<u8>,
}

impl CcrPath {
    pub fn min_gsnr_db(&self) -> f64 {
        self.gsnr_db.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CcrConnection {
    pub source: usize,
    pub destination: usize,
    pub paths: Vec<CcrPath>,
}

/// Channel-connection capacity table for every core pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CcrTable {
    pub n_channels: usize,
    pub connections: Vec<CcrConnection>,
    #[serde(skip)]
    index: BTreeMap<(usize, usize), usize>,
}

impl CcrTable {
    pub fn new(n_channels: usize, connections: Vec<CcrConnection>) -> Self {
        let index = connections.iter().enumerate().map(|(k, c)| ((c.source, c.destination), k)).collect();
        CcrTable { n_channels, connections, index }
    }

    /// Connection between two nodes in either order.
    pub fn connection(&self, a: usize, b: usize) -> Option<&CcrConnection> {
        self.index.get(&(a, b)).or_else(|| self.index.get(&(b, a))).map(|&k| &self.connections[k])
    }

    /// `src_id,dst_id,path_idx,channel_idx,gsnr_db,m,rate_gbps`
    pub fn write_csv<W: Write>(&self, topo: &Topology, trx: &TransceiverSpec, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["src_id", "dst_id", "path_idx", "channel_idx", "gsnr_db", "m", "rate_gbps"])?;
        for c in &self.connections {
            for (p, path) in c.paths.iter().enumerate() {
                for (ch, (&g, &m)) in path.gsnr_db.iter().zip(&path.cardinality).enumerate() {
                    w.write_record([
                        topo.node(c.source).id.to_string(),
                        topo.node(c.destination).id.to_string(),
                        p.to_string(),
                        ch.to_string(),
                        sig6(g),
                        m.to_string(),
                        sig6(trx.lci_rate_bps(m) / 1e9),
                    ])?;
                }
            }
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Inputs shared by every CCR cell.
pub struct CcrInputs<'a> {
    pub topo: &'a Topology,
    pub grid: &'a ChannelGrid,
    pub fiber: Arc<FiberSpec>,
    pub trx: &'a TransceiverSpec,
    pub penalties: &'a PenaltyConfig,
    /// Launch profile applied to every span of each link, indexed by link.
    pub launches: &'a [LaunchProfile],
    pub k: usize,
    pub pep_step_m: f64,
    pub nli: &'a dyn NliEstimator,
}

impl<'a> CcrInputs<'a> {
    pub fn new(
        topo: &'a Topology,
        grid: &'a ChannelGrid,
        fiber: Arc<FiberSpec>,
        trx: &'a TransceiverSpec,
        penalties: &'a PenaltyConfig,
        launches: &'a [LaunchProfile],
        k: usize,
    ) -> Self {
        CcrInputs { topo, grid, fiber, trx, penalties, launches, k, pep_step_m: DEFAULT_STEP_M, nli: &IncoherentGn }
    }
}

type AnalysisKey = (u64, Vec<u64>);

fn analysis_key(length_m: f64, launch: &LaunchProfile) -> AnalysisKey {
    (length_m.to_bits(), launch.powers().iter().map(|p| p.to_bits()).collect())
}

fn span_spec(inputs: &CcrInputs<'_>, link: usize, span: usize) -> SpanSpec {
    let l = inputs.topo.link(link);
    let s = &l.spans[span];
    SpanSpec::new(s.length_km, inputs.fiber.clone())
        .with_amplifiers(l.amplifiers.clone())
        .with_lumped_loss_db(s.lumped_loss_db)
}

/// Full-load GSNR and cardinality tables for the `k` shortest paths of every
/// core pair.
///
/// Propagation is computed once per distinct (span length, launch profile).
/// The amplifier closing the last span of a link restores the launch of the
/// next link on the path, or the link's own launch at the destination.
pub fn precompute_ccr(inputs: &CcrInputs<'_>) -> Result<CcrTable> {
    let topo = inputs.topo;
    let grid = inputs.grid;
    if inputs.launches.len() != topo.links().len() {
        return Err(Error::InvalidParameter(format!(
            "{} launch profiles for {} links",
            inputs.launches.len(),
            topo.links().len()
        )));
    }
    if inputs.launches.iter().any(|l| l.len() != grid.len()) {
        return Err(Error::InvalidParameter("launch profile not aligned with grid".into()));
    }

    let mut work: BTreeMap<AnalysisKey, (f64, usize)> = BTreeMap::new();
    for (li, link) in topo.links().iter().enumerate() {
        for s in &link.spans {
            work.entry(analysis_key(s.length_km * 1e3, &inputs.launches[li])).or_insert((s.length_km, li));
        }
    }
    let solver = PepSolver::new(&inputs.fiber, grid)?;
    let analyses: BTreeMap<AnalysisKey, SpanAnalysis> = work
        .into_par_iter()
        .map(|(key, (length_km, li))| {
            let span = SpanSpec::new(length_km, inputs.fiber.clone());
            let a = analyze_span(
                &solver,
                &span,
                grid,
                &inputs.launches[li],
                Direction::Forward,
                inputs.pep_step_m,
                inputs.nli,
            )?;
            Ok((key, a))
        })
        .collect::<Result<_>>()?;

    let pairs = topo.core_pairs();
    let connections = pairs
        .par_iter()
        .map(|&(s, d)| {
            let paths = k_shortest_paths(topo, s, d, inputs.k)
                .into_iter()
                .map(|path| evaluate_path(inputs, &analyses, path))
                .collect::<Result<Vec<_>>>()?;
            Ok(CcrConnection { source: s, destination: d, paths })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CcrTable::new(grid.len(), connections))
}

fn evaluate_path(
    inputs: &CcrInputs<'_>,
    analyses: &BTreeMap<AnalysisKey, SpanAnalysis>,
    path: CandidatePath,
) -> Result<CcrPath> {
    let n = inputs.grid.len();
    let mut inverse = vec![0.0; n];
    for (pos, &li) in path.links.iter().enumerate() {
        let launch = &inputs.launches[li];
        let link = inputs.topo.link(li);
        let next_launch = path.links.get(pos + 1).map(|&nl| &inputs.launches[nl]).unwrap_or(launch);
        for si in 0..link.spans.len() {
            let spec = span_spec(inputs, li, si);
            let a = &analyses[&analysis_key(spec.length_m, launch)];
            let target = if si + 1 == link.spans.len() { next_launch } else { launch };
            let b = span_gsnr(&spec, inputs.grid, launch, &a.received(), &a.nli_w, target, inputs.trx)?;
            for (ch, inv) in inverse.iter_mut().enumerate() {
                *inv += 1.0 / b.gsnr_lin(ch);
            }
        }
    }
    let gsnr_db: Vec<f64> =
        inverse.iter().map(|&inv| combine_inverse_gsnr(inv, inputs.penalties, inputs.trx, path.roadm_hops)).collect();
    let cardinality = gsnr_db.iter().map(|&g| modulation_from_gsnr(g, inputs.trx)).collect();
    Ok(CcrPath { path, gsnr_db, cardinality })
}
