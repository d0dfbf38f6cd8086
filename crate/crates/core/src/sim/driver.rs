use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::network::{generate_demand_sequence, CcrTable, Topology};
use crate::physics::ChannelGrid;
use crate::qot::TransceiverSpec;
use crate::report::sig6;

use super::{run_simulation, SimConfig, SimOutcome};

/// One simulation per seed, each with its own demand sequence.
pub fn run_seeds(
    topo: &Topology,
    grid: &ChannelGrid,
    ccr: &CcrTable,
    trx: &TransceiverSpec,
    cfg: &SimConfig,
    demand_count: usize,
    seeds: &[u64],
) -> Result<Vec<SimOutcome>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let demands = generate_demand_sequence(topo, seed, demand_count)?;
            Ok(run_simulation(ccr, grid, topo.links().len(), trx, &demands, cfg))
        })
        .collect()
}

/// Seed-averaged metrics at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub demands: usize,
    /// Mean cumulative offered traffic, Gb/s.
    pub load_gbps: f64,
    pub bbp_mean: f64,
    pub bbp_std: f64,
    pub lci_count_mean: f64,
    /// Mean over seeds of the per-run mean LCI GSNR (runs without LCIs skipped).
    pub gsnr_mean_db: f64,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, var.sqrt())
}

/// Averages checkpoints across runs. Runs must share the checkpoint layout
/// (same demand count and checkpoint interval).
pub fn load_curve(outcomes: &[SimOutcome]) -> Vec<CurveRow> {
    let Some(first) = outcomes.first() else {
        return Vec::new();
    };
    (0..first.checkpoints.len())
        .map(|k| {
            let at: Vec<_> = outcomes.iter().map(|o| &o.checkpoints[k]).collect();
            let loads: Vec<f64> = at.iter().map(|m| m.offered_bps / 1e9).collect();
            let bbp: Vec<f64> = at.iter().map(|m| m.bbp).collect();
            let lcis: Vec<f64> = at.iter().map(|m| m.lci_count as f64).collect();
            let gsnr: Vec<f64> = at.iter().map(|m| m.mean_gsnr_db).filter(|g| g.is_finite()).collect();
            let (bbp_mean, bbp_std) = mean_std(&bbp);
            CurveRow {
                demands: at[0].demands,
                load_gbps: mean_std(&loads).0,
                bbp_mean,
                bbp_std,
                lci_count_mean: mean_std(&lcis).0,
                gsnr_mean_db: if gsnr.is_empty() { f64::NAN } else { mean_std(&gsnr).0 },
            }
        })
        .collect()
}

/// Offered load at which the mean BBP first reaches `target`, linearly
/// interpolated between checkpoints (the curve starts at zero load, zero
/// BBP). `None` if the target is never reached.
pub fn throughput_at_bbp(curve: &[CurveRow], target: f64) -> Option<f64> {
    let mut prev = (0.0, 0.0);
    for row in curve {
        if row.bbp_mean >= target {
            let (l0, b0) = prev;
            if row.bbp_mean == b0 {
                return Some(row.load_gbps);
            }
            return Some(l0 + (target - b0) / (row.bbp_mean - b0) * (row.load_gbps - l0));
        }
        prev = (row.load_gbps, row.bbp_mean);
    }
    None
}

pub fn write_curve_csv<W: Write>(rows: &[CurveRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["demands", "load_gbps", "bbp_mean", "bbp_std", "lci_count_mean", "gsnr_mean_db"])?;
    for r in rows {
        w.write_record([
            r.demands.to_string(),
            sig6(r.load_gbps),
            sig6(r.bbp_mean),
            sig6(r.bbp_std),
            sig6(r.lci_count_mean),
            sig6(r.gsnr_mean_db),
        ])?;
    }
    w.flush().map_err(|e| crate::error::Error::io("<csv>", e))?;
    Ok(())
}
