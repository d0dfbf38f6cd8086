use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::pep::{FittedLossModel, LaunchProfile};
use crate::physics::{ChannelGrid, SpanSpec};

/// Nonlinear-interference model for one span.
///
/// Implementations return launch-referred NLI powers in W for every channel.
pub trait NliEstimator: Send + Sync {
    fn nli_powers(
        &self,
        span: &SpanSpec,
        fit: &FittedLossModel,
        grid: &ChannelGrid,
        launch: &LaunchProfile,
    ) -> Result<Vec<f64>>;

    fn nli_power(
        &self,
        span: &SpanSpec,
        fit: &FittedLossModel,
        grid: &ChannelGrid,
        launch: &LaunchProfile,
        channel: usize,
    ) -> Result<f64> {
        let all = self.nli_powers(span, fit, grid, launch)?;
        all.get(channel)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("channel {channel} outside grid of {}", all.len())))
    }
}

/// Power-independent SPM and XPM efficiencies, 1/W².
#[derive(Debug, Clone)]
pub struct NliCoefficients {
    n: usize,
    spm: Vec<f64>,
    xpm: Vec<f64>,
}

impl NliCoefficients {
    pub fn spm(&self, i: usize) -> f64 {
        self.spm[i]
    }

    pub fn xpm(&self, i: usize, j: usize) -> f64 {
        self.xpm[i * self.n + j]
    }

    /// `η_SPM,i P_i³ + Σ_{j≠i} η_XPM,ij P_i P_j²`
    pub fn apply(&self, launch: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let row = &self.xpm[i * self.n..(i + 1) * self.n];
                let xpm: f64 = row.iter().zip(launch).map(|(e, p)| e * p * p).sum();
                let pi = launch[i];
                self.spm[i] * pi * pi * pi + pi * xpm
            })
            .collect()
    }
}

/// `asinh(c·a) / (d·a)`, continuous at `a = 0`.
fn asinh_ratio(c: f64, d: f64, a: f64) -> f64 {
    let x = c * a;
    if x.abs() < 1e-8 {
        c / d
    } else {
        x.asinh() / (d * a)
    }
}

/// Incoherent GN-style closed form on the fitted effective-loss model.
///
/// Effective lengths are integrated from the fitted `α(z)`, the asymptotic
/// length is `1/α0`, dispersion and nonlinearity are the pairwise effective
/// values.
#[derive(Debug, Clone, Copy, Default)]
pub struct IncoherentGn;

impl IncoherentGn {
    pub fn coefficients(&self, span: &SpanSpec, fit: &FittedLossModel, grid: &ChannelGrid) -> Result<NliCoefficients> {
        let n = grid.len();
        if fit.n_channels() != n {
            return Err(Error::InvalidParameter(format!("fit covers {} channels, grid has {n}", fit.n_channels())));
        }
        let fiber = &span.fiber;
        let ch = grid.channels();
        if let Some(c) = ch.iter().find(|c| !(c.bandwidth_hz > 0.0)) {
            return Err(Error::InvalidParameter(format!("channel {} has zero bandwidth", c.index)));
        }
        let l_eff: Vec<f64> = (0..n).map(|k| fit.effective_length(k, span.length_m)).collect();
        // 1/α0, guarded for channels whose fitted background loss is not positive
        let l_asym: Vec<f64> =
            fit.alpha0.iter().zip(&l_eff).map(|(&a0, &le)| if a0 > 0.0 { 1.0 / a0 } else { le }).collect();

        let mut spm = Vec::with_capacity(n);
        for i in 0..n {
            let gamma = fiber.pair_gamma(ch[i].center_hz, ch[i].center_hz)?;
            let b2 = fiber.effective_beta2(ch[i].center_hz, ch[i].center_hz).abs();
            let bw = ch[i].bandwidth_hz;
            let a = b2 * l_asym[i] * bw * bw;
            spm.push(16.0 / 27.0 * gamma * gamma * l_eff[i] * l_eff[i] * asinh_ratio(PI * PI / 2.0, PI, a));
        }

        let mut xpm = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let gamma = fiber.pair_gamma(ch[i].center_hz, ch[j].center_hz)?;
                let b2 = fiber.effective_beta2(ch[i].center_hz, ch[j].center_hz).abs();
                let df = (ch[i].center_hz - ch[j].center_hz).abs();
                let a = b2 * l_asym[j] * ch[j].bandwidth_hz * df;
                xpm[i * n + j] = 32.0 / 27.0 * gamma * gamma * l_eff[j] * l_eff[j] * asinh_ratio(PI * PI, 2.0 * PI, a);
            }
        }
        Ok(NliCoefficients { n, spm, xpm })
    }
}

impl NliEstimator for IncoherentGn {
    fn nli_powers(
        &self,
        span: &SpanSpec,
        fit: &FittedLossModel,
        grid: &ChannelGrid,
        launch: &LaunchProfile,
    ) -> Result<Vec<f64>> {
        if launch.len() != grid.len() {
            return Err(Error::InvalidParameter("launch length differs from grid".into()));
        }
        Ok(self.coefficients(span, fit, grid)?.apply(launch.powers()))
    }
}
