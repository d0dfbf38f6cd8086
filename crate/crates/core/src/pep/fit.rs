use crate::error::{Error, Result};
use crate::physics::ChannelGrid;
use crate::units::neper_to_db;

use super::{LaunchProfile, PowerEvolutionProfile};

/// Lower end of the decay-rate search, 1/m.
pub const SIGMA_MIN: f64 = 1e-7;
/// Upper end of the decay-rate search, 1/m.
pub const SIGMA_MAX: f64 = 1e-3;
/// Absolute tolerance of the golden-section search on σ, 1/m.
pub const SIGMA_TOL: f64 = 1e-9;

const COARSE_POINTS: usize = 25;
const MIN_SAMPLES: usize = 10;

/// Effective loss `α(z) = α0 + α1·exp(−σz)` per channel (all in 1/m).
#[derive(Debug, Clone, PartialEq)]
pub struct FittedLossModel {
    pub alpha0: Vec<f64>,
    pub alpha1: Vec<f64>,
    pub sigma: Vec<f64>,
    /// RMS residual of each channel's fit, dB.
    pub channel_rms_db: Vec<f64>,
    /// Worst channel RMS residual, dB.
    pub fit_rms_error_db: f64,
    pub m: u32,
}

impl FittedLossModel {
    /// Builds a model from explicit parameters; RMS errors are zero.
    pub fn from_parameters(alpha0: Vec<f64>, alpha1: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        let n = alpha0.len();
        if alpha1.len() != n || sigma.len() != n {
            return Err(Error::InvalidParameter("parameter vectors differ in length".into()));
        }
        if sigma.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::InvalidParameter("σ must be positive".into()));
        }
        let m = parameter_m(&alpha1, &sigma);
        Ok(FittedLossModel { alpha0, alpha1, sigma, channel_rms_db: vec![0.0; n], fit_rms_error_db: 0.0, m })
    }

    pub fn n_channels(&self) -> usize {
        self.alpha0.len()
    }

    /// Accumulated loss `∫0^z α(z') dz'` in nepers.
    pub fn integrated_loss(&self, channel: usize, z_m: f64) -> f64 {
        let (a0, a1, s) = (self.alpha0[channel], self.alpha1[channel], self.sigma[channel]);
        a0 * z_m + a1 / s * (-(-s * z_m).exp_m1())
    }

    pub fn power_at(&self, channel: usize, launch_w: f64, z_m: f64) -> f64 {
        launch_w * (-self.integrated_loss(channel, z_m)).exp()
    }

    /// `∫0^L exp(−∫0^z α) dz` by composite Simpson.
    pub fn effective_length(&self, channel: usize, length_m: f64) -> f64 {
        const INTERVALS: usize = 512;
        let h = length_m / INTERVALS as f64;
        let f = |z: f64| (-self.integrated_loss(channel, z)).exp();
        let mut acc = f(0.0) + f(length_m);
        for k in 1..INTERVALS {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(k as f64 * h);
        }
        acc * h / 3.0
    }

    /// Profile predicted by the model at the given z samples.
    pub fn reconstruct(&self, launch: &LaunchProfile, z_m: &[f64]) -> Result<PowerEvolutionProfile> {
        let n = self.n_channels();
        if launch.len() != n {
            return Err(Error::InvalidParameter("launch length differs from model".into()));
        }
        let mut power = Vec::with_capacity(n * z_m.len());
        for &z in z_m {
            for (i, &p0) in launch.powers().iter().enumerate() {
                power.push(self.power_at(i, p0, z));
            }
        }
        PowerEvolutionProfile::new(z_m.to_vec(), n, power)
    }
}

fn parameter_m(alpha1: &[f64], sigma: &[f64]) -> u32 {
    alpha1.iter().zip(sigma).map(|(a1, s)| (10.0 * (2.0 * a1 / s).abs()).floor() as u32 + 1).max().unwrap_or(1)
}

/// One channel's log-loss samples `y_k = ln P(0) − ln P(z_k)`.
struct ChannelData<'a> {
    z: &'a [f64],
    y: Vec<f64>,
}

struct LinearFit {
    alpha0: f64,
    alpha1: f64,
    sse: f64,
}

impl ChannelData<'_> {
    /// Least squares in (α0, α1) for fixed σ, regressors z and (1 − e^{−σz})/σ.
    fn solve(&self, sigma: f64) -> LinearFit {
        let (mut saa, mut sab, mut sbb, mut say, mut sby, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let mut decay = 1.0;
        let mut last_dz = f64::NAN;
        let mut factor = 1.0;
        let mut prev_z = self.z[0];
        let base = (-sigma * prev_z).exp();
        decay *= base;
        for (k, (&z, &y)) in self.z.iter().zip(&self.y).enumerate() {
            if k > 0 {
                let dz = z - prev_z;
                // uniform grids reuse the step factor instead of calling exp
                if dz != last_dz {
                    factor = (-sigma * dz).exp();
                    last_dz = dz;
                }
                decay *= factor;
                prev_z = z;
            }
            let a = z;
            let b = (1.0 - decay) / sigma;
            saa += a * a;
            sab += a * b;
            sbb += b * b;
            say += a * y;
            sby += b * y;
            syy += y * y;
        }
        let det = saa * sbb - sab * sab;
        if !(det > 1e-12 * saa * sbb) {
            // regressors collinear: no visible z-dependence of the loss
            let alpha0 = if saa > 0.0 { say / saa } else { 0.0 };
            return LinearFit { alpha0, alpha1: 0.0, sse: (syy - alpha0 * say).max(0.0) };
        }
        let alpha0 = (say * sbb - sby * sab) / det;
        let alpha1 = (sby * saa - say * sab) / det;
        LinearFit { alpha0, alpha1, sse: (syy - alpha0 * say - alpha1 * sby).max(0.0) }
    }

    fn rms_db(&self, alpha0: f64, alpha1: f64, sigma: f64) -> f64 {
        let sse: f64 = self
            .z
            .iter()
            .zip(&self.y)
            .map(|(&z, &y)| {
                let r = y - (alpha0 * z + alpha1 / sigma * (-(-sigma * z).exp_m1()));
                r * r
            })
            .sum();
        neper_to_db((sse / self.z.len() as f64).sqrt())
    }
}

/// Log-spaced coarse scan to bracket the best σ, then golden-section inside
/// the bracket.
fn best_sigma(data: &ChannelData<'_>) -> f64 {
    let ratio = (SIGMA_MAX / SIGMA_MIN).ln() / (COARSE_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..COARSE_POINTS).map(|k| SIGMA_MIN * (ratio * k as f64).exp()).collect();
    let sse: Vec<f64> = grid.iter().map(|&s| data.solve(s).sse).collect();
    let k = sse.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(k, _)| k).unwrap_or(0);
    let mut lo = grid[k.saturating_sub(1)];
    let mut hi = grid[(k + 1).min(COARSE_POINTS - 1)];

    const INV_PHI: f64 = 0.618_033_988_749_895;
    let f = |s: f64| data.solve(s).sse;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > SIGMA_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    // the coarse winner can beat the refined point when the surface is flat
    if f(mid) <= sse[k] {
        mid
    } else {
        grid[k]
    }
}

/// Fits `ln P_i(z) = ln P_i(0) − [α0 z + (α1/σ)(1 − e^{−σz})]` per channel.
pub fn fit_loss_model(pep: &PowerEvolutionProfile, grid: &ChannelGrid) -> Result<FittedLossModel> {
    let n = pep.n_channels();
    if grid.len() != n {
        return Err(Error::InvalidParameter(format!("profile has {n} channels, grid has {}", grid.len())));
    }
    if pep.n_samples() < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "loss fit needs at least {MIN_SAMPLES} z samples, got {}",
            pep.n_samples()
        )));
    }
    let z0 = pep.z()[0];
    let z: Vec<f64> = pep.z().iter().map(|&v| v - z0).collect();

    let mut alpha0 = Vec::with_capacity(n);
    let mut alpha1 = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut rms = Vec::with_capacity(n);
    for i in 0..n {
        let series: Vec<f64> = pep.channel_series(i).collect();
        if series.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::DegenerateFit { channel: i, reason: "power is zero somewhere along the span".into() });
        }
        let ln0 = series[0].ln();
        let data = ChannelData { z: &z, y: series.iter().map(|p| ln0 - p.ln()).collect() };
        let s = best_sigma(&data);
        let lf = data.solve(s);
        rms.push(data.rms_db(lf.alpha0, lf.alpha1, s));
        alpha0.push(lf.alpha0);
        alpha1.push(lf.alpha1);
        sigma.push(s);
    }
    let m = parameter_m(&alpha1, &sigma);
    let worst = rms.iter().copied().fold(0.0, f64::max);
    Ok(FittedLossModel { alpha0, alpha1, sigma, channel_rms_db: rms, fit_rms_error_db: worst, m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{build_channel_grid, BandPlan};

    fn synthetic(n: usize, a0: f64, a1: f64, s: f64, length_m: f64) -> PowerEvolutionProfile {
        let model = FittedLossModel::from_parameters(vec![a0; n], vec![a1; n], vec![s; n]).unwrap();
        let z: Vec<f64> = (0..=1400).map(|k| k as f64 * length_m / 1400.0).collect();
        model.reconstruct(&LaunchProfile::flat_dbm(n, 0.0), &z).unwrap()
    }

    fn tiny_grid(n: usize) -> ChannelGrid {
        let full = build_channel_grid(&BandPlan::c_only()).unwrap();
        ChannelGrid::from_channels(full.channels()[..n].to_vec(), full.spacing_hz()).unwrap()
    }

    #[test]
    fn recovers_planted_parameters() {
        let pep = synthetic(2, 4.6e-5, 5e-6, 2e-5, 70e3);
        let fit = fit_loss_model(&pep, &tiny_grid(2)).unwrap();
        assert!(fit.fit_rms_error_db < 0.01, "{}", fit.fit_rms_error_db);
        assert!((fit.alpha0[0] - 4.6e-5).abs() < 1e-8, "{}", fit.alpha0[0]);
        assert!((fit.alpha1[0] - 5e-6).abs() < 1e-8, "{}", fit.alpha1[0]);
        assert!((fit.sigma[0] - 2e-5).abs() < 1e-7, "{}", fit.sigma[0]);
        // M = floor(10 * 2 * 5e-6 / 2e-5) + 1 = 6
        assert_eq!(fit.m, 6);
    }

    #[test]
    fn constant_loss_gives_m_one() {
        let pep = synthetic(1, 4.6e-5, 0.0, 1e-5, 70e3);
        let fit = fit_loss_model(&pep, &tiny_grid(1)).unwrap();
        assert!((fit.alpha0[0] - 4.6e-5).abs() < 1e-10);
        assert!(fit.alpha1[0].abs() < 1e-9);
        assert_eq!(fit.m, 1);
    }

    #[test]
    fn m_is_one_when_alpha1_vanishes() {
        let model = FittedLossModel::from_parameters(vec![4e-5; 3], vec![0.0; 3], vec![1e-5, 3e-5, 5e-4]).unwrap();
        assert_eq!(model.m, 1);
    }

    #[test]
    fn zero_power_is_degenerate() {
        let pep = PowerEvolutionProfile::new((0..20).map(|k| k as f64).collect(), 1, vec![0.0; 20]).unwrap();
        assert!(matches!(fit_loss_model(&pep, &tiny_grid(1)), Err(Error::DegenerateFit { .. })));
    }

    #[test]
    fn too_few_samples_rejected() {
        let pep = PowerEvolutionProfile::new(vec![0.0, 1.0], 1, vec![1.0, 0.9]).unwrap();
        assert!(fit_loss_model(&pep, &tiny_grid(1)).is_err());
    }

    #[test]
    fn effective_length_matches_closed_form_without_isrs() {
        let a = 4.6e-5;
        let model = FittedLossModel::from_parameters(vec![a], vec![0.0], vec![1e-5]).unwrap();
        let l = 80e3;
        let exact = (1.0 - (-a * l).exp()) / a;
        assert!((model.effective_length(0, l) - exact).abs() < 1e-6 * exact);
    }
}
