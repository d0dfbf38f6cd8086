use serde::{Deserialize, Serialize};

use crate::network::CcrPath;
use crate::physics::ChannelGrid;
use crate::qot::{modulation_from_gsnr, TransceiverSpec};

/// How an LCI's modulation cardinality is chosen from the CCR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModulationPolicy {
    /// The channel's own GSNR.
    #[serde(rename = "CBG")]
    Cbg,
    /// Worst GSNR over all channels of the path.
    #[serde(rename = "WAB")]
    Wab,
    /// Worst GSNR within the channel's band.
    #[serde(rename = "WPB")]
    Wpb,
}

impl ModulationPolicy {
    pub const ALL: [ModulationPolicy; 3] = [ModulationPolicy::Cbg, ModulationPolicy::Wab, ModulationPolicy::Wpb];
}

impl std::fmt::Display for ModulationPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModulationPolicy::Cbg => "CBG",
            ModulationPolicy::Wab => "WAB",
            ModulationPolicy::Wpb => "WPB",
        })
    }
}

/// Candidate-path scoring rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathPolicy {
    /// Maximise the minimum GSNR of the new LCIs.
    #[serde(rename = "MaxMinGF")]
    MaxMinGf,
    /// Minimise the highest channel index of the new LCIs.
    #[serde(rename = "MinMaxF")]
    MinMaxF,
}

impl std::fmt::Display for PathPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PathPolicy::MaxMinGf => "MaxMinGF",
            PathPolicy::MinMaxF => "MinMaxF",
        })
    }
}

/// Cardinality of `channel` on `path` under `policy`.
pub fn select_modulation(
    policy: ModulationPolicy,
    path: &CcrPath,
    grid: &ChannelGrid,
    channel: usize,
    trx: &TransceiverSpec,
) -> u8 {
    match policy {
        ModulationPolicy::Cbg => path.cardinality[channel],
        ModulationPolicy::Wab => modulation_from_gsnr(path.min_gsnr_db(), trx),
        ModulationPolicy::Wpb => {
            let band = grid.channel(channel).band;
            let worst = grid.indices_in(band).map(|i| path.gsnr_db[i]).fold(f64::INFINITY, f64::min);
            modulation_from_gsnr(worst, trx)
        }
    }
}

/// [`select_modulation`] for every channel at once.
pub fn effective_cardinalities(
    policy: ModulationPolicy,
    path: &CcrPath,
    grid: &ChannelGrid,
    trx: &TransceiverSpec,
) -> Vec<u8> {
    match policy {
        ModulationPolicy::Cbg => path.cardinality.clone(),
        ModulationPolicy::Wab => vec![modulation_from_gsnr(path.min_gsnr_db(), trx); grid.len()],
        ModulationPolicy::Wpb => {
            let mut out = vec![0; grid.len()];
            for band in grid.bands() {
                let idx: Vec<usize> = grid.indices_in(band).collect();
                let worst = idx.iter().map(|&i| path.gsnr_db[i]).fold(f64::INFINITY, f64::min);
                let m = modulation_from_gsnr(worst, trx);
                for i in idx {
                    out[i] = m;
                }
            }
            out
        }
    }
}
