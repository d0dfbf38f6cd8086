use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pep::{Direction, FittedLossModel, LaunchProfile, PepSolver, DEFAULT_STEP_M};
use crate::physics::{BandName, ChannelGrid, FiberSpec, RamanProfile, SampledProfile, SpanSpec};
use crate::qot::{
    analyze_span, ase_power, span_gsnr, IncoherentGn, NliEstimator, SpanAnalysis, SpanNoiseBreakdown, TransceiverSpec,
};
use crate::units::{db_to_lin, dbm_to_w, w_to_dbm};

use super::span_total_capacity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LaunchMode {
    /// Flat launch power, forward propagation.
    #[serde(rename = "FLP")]
    Flp,
    /// Flat received power, backward propagation for the pre-tilted launch.
    #[serde(rename = "FRP")]
    Frp,
}

impl std::fmt::Display for LaunchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LaunchMode::Flp => "FLP",
            LaunchMode::Frp => "FRP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HpoConfig {
    /// Per-channel launch cap, dBm.
    pub p_max_dbm: f64,
    pub step_db: f64,
    pub mode: LaunchMode,
    /// FLP scans `[P_LOGO, P_LOGO + flp_range_db]`.
    pub flp_range_db: f64,
    /// Upper end of the FRP received-power scan, dBm.
    pub frp_end_dbm: f64,
    /// Refine the FRP target band by band after the common flat scan.
    pub per_band_frp: bool,
    pub pep_step_m: f64,
}

impl Default for HpoConfig {
    fn default() -> Self {
        HpoConfig {
            p_max_dbm: 6.0,
            step_db: 0.1,
            mode: LaunchMode::Flp,
            flp_range_db: 3.0,
            frp_end_dbm: 0.0,
            per_band_frp: false,
            pep_step_m: DEFAULT_STEP_M,
        }
    }
}

impl HpoConfig {
    pub fn with_mode(mut self, mode: LaunchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_db > 0.0 && self.step_db.is_finite()) {
            return Err(Error::InvalidParameter(format!("power step {} dB must be positive", self.step_db)));
        }
        if !self.p_max_dbm.is_finite() && self.p_max_dbm != f64::NEG_INFINITY {
            return Err(Error::InvalidParameter("launch cap must be finite".into()));
        }
        if !(self.flp_range_db >= 0.0) || !self.frp_end_dbm.is_finite() {
            return Err(Error::InvalidParameter("scan range must be finite".into()));
        }
        if !(self.pep_step_m > 0.0) {
            return Err(Error::InvalidParameter("integration step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStats {
    pub band: BandName,
    pub mean: f64,
    pub std: f64,
    /// max − min
    pub spread: f64,
}

/// Flatness metrics per band, all in dB or dBm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileStats {
    pub launch_dbm: Vec<BandStats>,
    pub received_dbm: Vec<BandStats>,
    pub gsnr_db: Vec<BandStats>,
    pub osnr_db: Vec<BandStats>,
}

impl ProfileStats {
    fn compute(grid: &ChannelGrid, launch: &[f64], received: &[f64], gsnr: &[f64], osnr: &[f64]) -> Self {
        ProfileStats {
            launch_dbm: band_stats(grid, launch),
            received_dbm: band_stats(grid, received),
            gsnr_db: band_stats(grid, gsnr),
            osnr_db: band_stats(grid, osnr),
        }
    }
}

fn band_stats(grid: &ChannelGrid, values: &[f64]) -> Vec<BandStats> {
    grid.bands()
        .into_iter()
        .map(|band| {
            let v: Vec<f64> = grid.indices_in(band).map(|i| values[i]).collect();
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
            BandStats { band, mean, std: var.sqrt(), spread: max - min }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct HpoResult {
    pub mode: LaunchMode,
    /// Flat launch (FLP) or flat received (FRP) power of the optimum, dBm.
    pub optimal_flat_power_dbm: f64,
    pub total_capacity_bps: f64,
    pub launch: LaunchProfile,
    pub received: LaunchProfile,
    pub gsnr_db: Vec<f64>,
    pub osnr_db: Vec<f64>,
    pub stats: ProfileStats,
    /// First candidate of the scan, dBm.
    pub scan_start_dbm: f64,
    /// `(candidate dBm, TC bit/s)` for every candidate evaluated.
    pub trace: Vec<(f64, f64)>,
    /// Per-band received offsets from the flat optimum; empty unless the
    /// per-band FRP refinement ran.
    pub band_offsets_db: Vec<(BandName, f64)>,
    #[serde(skip)]
    pub breakdown: SpanNoiseBreakdown,
}

impl HpoResult {
    pub fn launch_dbm(&self) -> Vec<f64> {
        self.launch.to_dbm()
    }

    pub fn received_dbm(&self) -> Vec<f64> {
        self.received.to_dbm()
    }
}

struct Evaluation {
    analysis: SpanAnalysis,
    breakdown: SpanNoiseBreakdown,
    tc: f64,
}

struct ScanOutcome {
    power_dbm: f64,
    best: Evaluation,
    trace: Vec<(f64, f64)>,
}

/// Span-level optimiser bound to one span, grid and NLI model.
pub struct SpanOptimizer<'a> {
    span: &'a SpanSpec,
    grid: &'a ChannelGrid,
    trx: &'a TransceiverSpec,
    nli: &'a dyn NliEstimator,
    solver: PepSolver,
}

impl<'a> SpanOptimizer<'a> {
    pub fn new(span: &'a SpanSpec, grid: &'a ChannelGrid, trx: &'a TransceiverSpec) -> Result<Self> {
        Self::with_nli(span, grid, trx, &IncoherentGn)
    }

    pub fn with_nli(
        span: &'a SpanSpec,
        grid: &'a ChannelGrid,
        trx: &'a TransceiverSpec,
        nli: &'a dyn NliEstimator,
    ) -> Result<Self> {
        span.validate()?;
        trx.validate()?;
        let solver = PepSolver::new(&span.fiber, grid)?;
        Ok(SpanOptimizer { span, grid, trx, nli, solver })
    }

    pub fn solver(&self) -> &PepSolver {
        &self.solver
    }

    /// GSNR breakdown and capacity of the span in a periodic chain: the
    /// closing amplifier restores the launch profile.
    pub fn evaluate(
        &self,
        boundary: &LaunchProfile,
        direction: Direction,
        step_m: f64,
    ) -> Result<(SpanNoiseBreakdown, f64)> {
        let e = self.evaluate_full(boundary, direction, step_m)?;
        Ok((e.breakdown, e.tc))
    }

    fn evaluate_full(&self, boundary: &LaunchProfile, direction: Direction, step_m: f64) -> Result<Evaluation> {
        let analysis = analyze_span(&self.solver, self.span, self.grid, boundary, direction, step_m, self.nli)?;
        let launch = analysis.launch();
        let breakdown =
            span_gsnr(self.span, self.grid, &launch, &analysis.received(), &analysis.nli_w, &launch, self.trx)?;
        let tc = span_total_capacity(&breakdown, self.trx);
        Ok(Evaluation { analysis, breakdown, tc })
    }

    /// Ascending first-descent scan over `start + k·step`, `k = 0, 1, …`.
    fn scan(
        &self,
        start_dbm: f64,
        end_dbm: f64,
        cfg: &HpoConfig,
        direction: Direction,
        boundary: &dyn Fn(f64) -> LaunchProfile,
    ) -> Result<ScanOutcome> {
        let candidates = scan_points(start_dbm, end_dbm, cfg.step_db);
        if candidates.is_empty() {
            return Err(Error::EmptyScan(format!("no candidates between {start_dbm:.2} and {end_dbm:.2} dBm")));
        }
        let mut incumbent: Option<(f64, Evaluation)> = None;
        let mut trace = Vec::new();
        for p in candidates {
            let eval = self.evaluate_full(&boundary(p), direction, cfg.pep_step_m)?;
            let launch_max = eval.analysis.launch().max_dbm();
            if launch_max > cfg.p_max_dbm {
                if incumbent.is_none() {
                    return Err(Error::LaunchCapViolated { p_max_dbm: cfg.p_max_dbm, first_dbm: launch_max });
                }
                log::debug!("{p:.2} dBm: launch {launch_max:.2} dBm exceeds cap, stopping");
                break;
            }
            trace.push((p, eval.tc));
            if let Some((_, best)) = &incumbent {
                if eval.tc < best.tc {
                    log::debug!("{p:.2} dBm: capacity decreased, stopping");
                    break;
                }
            }
            incumbent = Some((p, eval));
        }
        let (power_dbm, best) = incumbent.expect("first candidate either accepted or rejected with error");
        Ok(ScanOutcome { power_dbm, best, trace })
    }

    pub fn flat_launch(&self, cfg: &HpoConfig) -> Result<HpoResult> {
        cfg.validate()?;
        let start = logo_reference_power(self.span, self.grid, self.trx);
        let n = self.grid.len();
        let out =
            self.scan(start, start + cfg.flp_range_db, cfg, Direction::Forward, &|p| LaunchProfile::flat_dbm(n, p))?;
        Ok(self.finish(LaunchMode::Flp, start, out, Vec::new()))
    }

    /// FRP scan starting from `P_FLP,opt − α_max·L`.
    pub fn flat_received(&self, cfg: &HpoConfig, flp_optimum_dbm: f64) -> Result<HpoResult> {
        cfg.validate()?;
        let alpha_max = self
            .grid
            .channels()
            .iter()
            .map(|c| self.span.fiber.alpha_db_per_km(c.center_hz))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let start = flp_optimum_dbm - alpha_max * self.span.length_km();
        let n = self.grid.len();
        let out = self.scan(start, cfg.frp_end_dbm, cfg, Direction::Backward, &|p| LaunchProfile::flat_dbm(n, p))?;
        if !cfg.per_band_frp {
            return Ok(self.finish(LaunchMode::Frp, start, out, Vec::new()));
        }
        let (out, offsets) = self.refine_per_band(cfg, out)?;
        Ok(self.finish(LaunchMode::Frp, start, out, offsets))
    }

    /// Coordinate search over per-band received offsets, one band at a time,
    /// upwards first and downwards if the first upward step loses capacity.
    fn refine_per_band(&self, cfg: &HpoConfig, mut out: ScanOutcome) -> Result<(ScanOutcome, Vec<(BandName, f64)>)> {
        let bands = self.grid.bands();
        let mut offsets = vec![0.0; bands.len()];
        let base = out.power_dbm;
        let profile = |offsets: &[f64]| -> LaunchProfile {
            let dbm: Vec<f64> = self
                .grid
                .channels()
                .iter()
                .map(|c| {
                    let b = bands.iter().position(|&x| x == c.band).unwrap_or(0);
                    base + offsets[b]
                })
                .collect();
            LaunchProfile::from_dbm(&dbm).expect("finite powers")
        };
        for b in 0..bands.len() {
            for sign in [1.0, -1.0] {
                let mut moved = false;
                loop {
                    let mut trial = offsets.clone();
                    trial[b] += sign * cfg.step_db;
                    if base + trial[b] > cfg.frp_end_dbm {
                        break;
                    }
                    let eval = self.evaluate_full(&profile(&trial), Direction::Backward, cfg.pep_step_m)?;
                    if eval.analysis.launch().max_dbm() > cfg.p_max_dbm {
                        break;
                    }
                    out.trace.push((base + trial[b], eval.tc));
                    if eval.tc <= out.best.tc {
                        break;
                    }
                    offsets = trial;
                    out.best = eval;
                    moved = true;
                }
                if moved {
                    break;
                }
            }
        }
        let offsets = bands.into_iter().zip(offsets).collect();
        Ok((out, offsets))
    }

    /// Runs the mode selected in `cfg`; FRP first runs FLP for its start point.
    pub fn optimize(&self, cfg: &HpoConfig) -> Result<HpoResult> {
        let flp = self.flat_launch(cfg)?;
        match cfg.mode {
            LaunchMode::Flp => Ok(flp),
            LaunchMode::Frp => self.flat_received(cfg, flp.optimal_flat_power_dbm),
        }
    }

    fn finish(&self, mode: LaunchMode, start: f64, out: ScanOutcome, offsets: Vec<(BandName, f64)>) -> HpoResult {
        let launch = out.best.analysis.launch();
        let received = out.best.analysis.received();
        let b = out.best.breakdown;
        let stats = ProfileStats::compute(self.grid, &launch.to_dbm(), &received.to_dbm(), &b.gsnr_db, &b.osnr_db);
        HpoResult {
            mode,
            optimal_flat_power_dbm: out.power_dbm,
            total_capacity_bps: out.best.tc,
            launch,
            received,
            gsnr_db: b.gsnr_db.clone(),
            osnr_db: b.osnr_db.clone(),
            stats,
            scan_start_dbm: start,
            trace: out.trace,
            band_offsets_db: offsets,
            breakdown: b,
        }
    }
}

fn scan_points(start: f64, end: f64, step: f64) -> Vec<f64> {
    if !(start.is_finite() && end.is_finite()) || start > end + 1e-9 * step {
        return Vec::new();
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|k| start + k as f64 * step).collect()
}

/// Optimises one span with the default NLI model.
pub fn optimize_span_power(
    span: &SpanSpec,
    grid: &ChannelGrid,
    trx: &TransceiverSpec,
    cfg: &HpoConfig,
) -> Result<HpoResult> {
    SpanOptimizer::new(span, grid, trx)?.optimize(cfg)
}

/// Flat launch power at which `P_NLI = P_ASE / 2` for the centre channel of
/// the C band (or of the grid if it has no C band), ignoring ISRS and the
/// frequency dependence of loss and effective area.
///
/// Falls back to 0 dBm if the condition cannot be bracketed.
pub fn logo_reference_power(span: &SpanSpec, grid: &ChannelGrid, trx: &TransceiverSpec) -> f64 {
    match logo_bisect(span, grid, trx) {
        Ok(p) => p,
        Err(e) => {
            log::warn!("reference power unavailable ({e}), using 0 dBm");
            0.0
        }
    }
}

fn logo_bisect(span: &SpanSpec, grid: &ChannelGrid, trx: &TransceiverSpec) -> Result<f64> {
    let band = if grid.center_of_band(BandName::C).is_some() {
        BandName::C
    } else if grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    } else {
        grid.channel(grid.len() / 2).band
    };
    let sub = grid.restrict_to(band);
    let probe = sub.center_of_band(band).expect("band is populated");
    let f_c = sub.channel(probe).center_hz;

    let alpha_db = span.fiber.alpha_db_per_km(f_c)?;
    let aeff = span.fiber.aeff(f_c)?;
    let lo = sub.min_frequency() - sub.spacing_hz();
    let hi = sub.max_frequency() + sub.spacing_hz();
    let fiber = FiberSpec {
        loss_db_per_km: SampledProfile::new(vec![lo, hi], vec![alpha_db; 2])?,
        aeff_m2: SampledProfile::new(vec![lo, hi], vec![aeff; 2])?,
        raman: RamanProfile::zero(hi - lo),
        ..(*span.fiber).clone()
    };
    let flat_span = SpanSpec { fiber: Arc::new(fiber), ..span.clone() };
    let alpha = flat_span.fiber.alpha(f_c)?;
    let n = sub.len();
    let fit = FittedLossModel::from_parameters(vec![alpha; n], vec![0.0; n], vec![1e-4; n])?;
    let coeff = IncoherentGn.coefficients(&flat_span, &fit, &sub)?;
    let eta = coeff.spm(probe) + (0..n).filter(|&j| j != probe).map(|j| coeff.xpm(probe, j)).sum::<f64>();

    let gain_db = alpha_db * span.length_km() + span.lumped_loss_db;
    let nf = span.amplifiers.for_band(band).noise_figure_lin();
    let p_ase = ase_power(db_to_lin(gain_db), nf, f_c, trx.symbol_rate_baud)?;

    let excess = |dbm: f64| {
        let p = dbm_to_w(dbm);
        eta * p * p * p - 0.5 * p_ase
    };
    let (mut a, mut b) = (-60.0, 40.0);
    if !(excess(a) < 0.0 && excess(b) > 0.0) {
        return Err(Error::InvalidParameter(format!("optimum not bracketed in [{a}, {b}] dBm")));
    }
    while b - a > 1e-9 {
        let m = 0.5 * (a + b);
        if excess(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let p = 0.5 * (a + b);
    log::debug!("reference power {p:.3} dBm ({} W)", w_to_dbm(dbm_to_w(p)));
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{build_channel_grid, BandPlan};

    fn c_setup(length_km: f64) -> (SpanSpec, ChannelGrid) {
        let grid = build_channel_grid(&BandPlan::c_only()).unwrap();
        (SpanSpec::new(length_km, Arc::new(FiberSpec::ssmf_default())), grid)
    }

    #[test]
    fn scan_points_are_exact_multiples() {
        let pts = scan_points(-1.3, 1.7, 0.1);
        assert_eq!(pts.len(), 31);
        assert_eq!(pts[7], -1.3 + 7.0 * 0.1);
        assert!(scan_points(1.0, 0.0, 0.1).is_empty());
        assert_eq!(scan_points(0.0, 0.0, 0.1), vec![0.0]);
    }

    #[test]
    fn logo_balances_nli_and_ase() {
        let (span, grid) = c_setup(80.0);
        let trx = TransceiverSpec::default();
        let p = logo_reference_power(&span, &grid, &trx);
        assert!(p > -10.0 && p < 10.0, "{p}");
    }

    #[test]
    fn logo_rises_with_noise_figure() {
        let (span, grid) = c_setup(80.0);
        let trx = TransceiverSpec::default();
        let base = logo_reference_power(&span, &grid, &trx);
        let mut noisy = span.clone();
        let nf = noisy.amplifiers.for_band(BandName::C).noise_figure_db;
        noisy.amplifiers.for_band_mut(BandName::C).noise_figure_db = nf + 10.0 * 2f64.log10();
        let raised = logo_reference_power(&noisy, &grid, &trx);
        assert!((raised - base - 10.0 * 2f64.log10() / 3.0).abs() < 1e-6);
    }

    #[test]
    fn logo_rises_with_loss() {
        let trx = TransceiverSpec::default();
        let (short, grid) = c_setup(60.0);
        let (long, _) = c_setup(100.0);
        assert!(logo_reference_power(&long, &grid, &trx) > logo_reference_power(&short, &grid, &trx));
    }

    #[test]
    fn cap_below_first_candidate_is_an_error() {
        let (span, grid) = c_setup(50.0);
        let trx = TransceiverSpec::default();
        let cfg = HpoConfig { p_max_dbm: f64::NEG_INFINITY, ..HpoConfig::default() };
        let err = optimize_span_power(&span, &grid, &trx, &cfg).unwrap_err();
        assert!(matches!(err, Error::LaunchCapViolated { .. }));
    }

    #[test]
    fn empty_frp_range_is_an_error() {
        let (span, grid) = c_setup(50.0);
        let trx = TransceiverSpec::default();
        let opt = SpanOptimizer::new(&span, &grid, &trx).unwrap();
        let cfg = HpoConfig { frp_end_dbm: -100.0, ..HpoConfig::default() };
        assert!(matches!(opt.flat_received(&cfg, 0.0), Err(Error::EmptyScan(_))));
    }

    #[test]
    fn flp_scan_respects_first_descent() {
        let (span, grid) = c_setup(60.0);
        let trx = TransceiverSpec::default();
        let cfg = HpoConfig { pep_step_m: 500.0, ..HpoConfig::default() };
        let res = optimize_span_power(&span, &grid, &trx, &cfg).unwrap();
        let tcs: Vec<f64> = res.trace.iter().map(|t| t.1).collect();
        for w in tcs.windows(2).take(tcs.len().saturating_sub(2)) {
            assert!(w[1] >= w[0]);
        }
        assert!(res.total_capacity_bps >= tcs.iter().cloned().fold(0.0, f64::max) - 1.0);
        for (k, (p, _)) in res.trace.iter().enumerate() {
            assert_eq!(*p, res.scan_start_dbm + k as f64 * 0.1);
        }
        assert!(res.launch.max_dbm() <= cfg.p_max_dbm);
    }

    #[test]
    fn launch_cap_stops_the_scan() {
        let (span, grid) = c_setup(60.0);
        let trx = TransceiverSpec::default();
        let start = logo_reference_power(&span, &grid, &trx);
        let cfg = HpoConfig { p_max_dbm: start + 0.25, pep_step_m: 500.0, ..HpoConfig::default() };
        let res = optimize_span_power(&span, &grid, &trx, &cfg).unwrap();
        assert!(res.optimal_flat_power_dbm <= start + 0.25);
        assert!(res.trace.len() <= 3);
    }
}
