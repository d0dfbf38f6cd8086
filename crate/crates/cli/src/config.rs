use std::path::{Path, PathBuf};
use std::sync::Arc;

use mbplan_core::hpo::HpoConfig;
use mbplan_core::network::{load_topology, Topology, FIXTURE_6NODE};
use mbplan_core::physics::{build_channel_grid, BandPlan, ChannelGrid, FiberSpec};
use mbplan_core::qot::{PenaltyConfig, TransceiverSpec};
use mbplan_core::sim::{ModulationPolicy, PathPolicy, SimConfig};
use serde::{Deserialize, Serialize};

/// Fiber tables read from CSV instead of the bundled SSMF profiles.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberFiles {
    pub loss_csv: PathBuf,
    pub aeff_csv: PathBuf,
    pub raman_csv: PathBuf,
    pub raman_reference_pump_hz: f64,
    #[serde(default = "yes")]
    pub pump_scaling: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpanSection {
    pub length_km: f64,
    pub launch_dbm: f64,
    pub lumped_loss_db: f64,
}

impl Default for SpanSection {
    fn default() -> Self {
        SpanSection { length_km: 70.0, launch_dbm: 0.0, lumped_loss_db: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub k: usize,
    /// First simulation seed; runs use `seed..seed + iterations`.
    pub seed: u64,
    pub iterations: u64,
    pub demand_count: usize,
    /// Seed for the lumped span losses drawn when the topology is loaded.
    pub loss_seed: u64,
    pub path_policy: PathPolicy,
    pub modulation_policy: ModulationPolicy,
    pub grooming: bool,
    pub checkpoint_every: usize,
}

impl Default for SimSection {
    fn default() -> Self {
        let s = SimConfig::default();
        SimSection {
            k: 3,
            seed: 1,
            iterations: 20,
            demand_count: 1000,
            loss_seed: 1,
            path_policy: s.path_policy,
            modulation_policy: s.modulation_policy,
            grooming: s.grooming,
            checkpoint_every: s.checkpoint_every,
        }
    }
}

impl SimSection {
    pub fn engine(&self) -> SimConfig {
        SimConfig {
            path_policy: self.path_policy,
            modulation_policy: self.modulation_policy,
            grooming: self.grooming,
            checkpoint_every: self.checkpoint_every,
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        (self.seed..self.seed + self.iterations).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GonSection {
    pub from_dbm: f64,
    pub to_dbm: f64,
    pub step_db: f64,
}

impl Default for GonSection {
    fn default() -> Self {
        GonSection { from_dbm: -4.0, to_dbm: 2.0, step_db: 1.0 }
    }
}

impl GonSection {
    pub fn powers(&self) -> Vec<f64> {
        let n = ((self.to_dbm - self.from_dbm) / self.step_db + 1e-9).floor() as i64;
        (0..=n.max(-1)).map(|k| self.from_dbm + k as f64 * self.step_db).collect()
    }
}

/// Everything a run needs. Every field has a default, so `{}` is a valid
/// config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub band_plan: BandPlan,
    pub fiber: Option<FiberFiles>,
    /// Topology JSON; the bundled six-node fixture when absent.
    pub topology: Option<PathBuf>,
    pub transceiver: TransceiverSpec,
    pub penalties: PenaltyConfig,
    pub hpo: HpoConfig,
    pub span: SpanSection,
    pub sim: SimSection,
    pub gon: GonSection,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            band_plan: BandPlan::lcs(),
            fiber: None,
            topology: None,
            transceiver: TransceiverSpec::default(),
            penalties: PenaltyConfig::default(),
            hpo: HpoConfig::default(),
            span: SpanSection::default(),
            sim: SimSection::default(),
            gon: GonSection::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), String> {
        self.band_plan.validate().map_err(|e| e.to_string())?;
        self.hpo.validate().map_err(|e| e.to_string())?;
        if self.sim.seed < 1 || self.sim.iterations < 1 {
            return Err("sim.seed and sim.iterations must be at least 1".into());
        }
        if self.sim.k < 1 || self.sim.demand_count < 1 || self.sim.checkpoint_every < 1 {
            return Err("sim.k, sim.demand_count and sim.checkpoint_every must be at least 1".into());
        }
        if !(self.span.length_km > 0.0) {
            return Err("span.length_km must be positive".into());
        }
        if !(self.gon.step_db > 0.0) {
            return Err("gon.step_db must be positive".into());
        }
        let mut files: Vec<&Path> = self.topology.iter().map(|p| p.as_path()).collect();
        if let Some(f) = &self.fiber {
            files.extend([f.loss_csv.as_path(), f.aeff_csv.as_path(), f.raman_csv.as_path()]);
        }
        for f in files {
            if !f.is_file() {
                return Err(format!("{}: file not found", f.display()));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<ChannelGrid, String> {
        build_channel_grid(&self.band_plan).map_err(|e| e.to_string())
    }

    pub fn fiber(&self, grid: &ChannelGrid) -> Result<Arc<FiberSpec>, String> {
        let fiber = match &self.fiber {
            None => FiberSpec::ssmf_default(),
            Some(f) => {
                FiberSpec::from_files(&f.loss_csv, &f.aeff_csv, &f.raman_csv, f.raman_reference_pump_hz, f.pump_scaling)
                    .map_err(|e| e.to_string())?
            }
        };
        fiber.check_covers(grid).map_err(|e| e.to_string())?;
        Ok(Arc::new(fiber))
    }

    pub fn topology(&self) -> Result<Topology, String> {
        match &self.topology {
            Some(p) => load_topology(p, &self.penalties, self.sim.loss_seed),
            None => Topology::from_json_str(FIXTURE_6NODE, &self.penalties, self.sim.loss_seed),
        }
        .map_err(|e| e.to_string())
    }
}
