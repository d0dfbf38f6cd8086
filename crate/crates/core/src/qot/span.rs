use serde::Serialize;

use crate::error::{Error, Result};
use crate::pep::{fit_loss_model, Direction, FittedLossModel, LaunchProfile, PepSolver, PowerEvolutionProfile};
use crate::physics::{ChannelGrid, SpanSpec};
use crate::units::lin_to_db;

use super::{amplifier_gains, ase_power, NliEstimator, TransceiverSpec};

/// Per-channel noise budget of one span, referred to the output of the
/// amplifier that closes it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanNoiseBreakdown {
    /// Signal power `P` after the closing amplifier, W.
    pub signal_w: Vec<f64>,
    pub p_ase: Vec<f64>,
    pub p_nli: Vec<f64>,
    pub gain_db: Vec<f64>,
    pub gain_clamped: Vec<bool>,
    pub gsnr_db: Vec<f64>,
    pub osnr_db: Vec<f64>,
}

impl SpanNoiseBreakdown {
    pub fn n_channels(&self) -> usize {
        self.gsnr_db.len()
    }

    pub fn gsnr_lin(&self, channel: usize) -> f64 {
        self.signal_w[channel] / (self.p_ase[channel] + self.p_nli[channel])
    }
}

/// Propagation result for one span and launch, independent of the power the
/// closing amplifier is asked to deliver.
#[derive(Debug, Clone)]
pub struct SpanAnalysis {
    pub pep: PowerEvolutionProfile,
    pub fit: FittedLossModel,
    /// Launch-referred NLI, W.
    pub nli_w: Vec<f64>,
}

impl SpanAnalysis {
    pub fn launch(&self) -> LaunchProfile {
        self.pep.launch()
    }

    pub fn received(&self) -> LaunchProfile {
        self.pep.received()
    }
}

/// Propagates `boundary` (launch for forward, received for backward), fits the
/// loss model and evaluates NLI at the resulting launch.
pub fn analyze_span(
    solver: &PepSolver,
    span: &SpanSpec,
    grid: &ChannelGrid,
    boundary: &LaunchProfile,
    direction: Direction,
    step_m: f64,
    nli: &dyn NliEstimator,
) -> Result<SpanAnalysis> {
    let pep = solver.solve(boundary, span.length_m, direction, step_m)?;
    let fit = fit_loss_model(&pep, grid)?;
    let nli_w = nli.nli_powers(span, &fit, grid, &pep.launch())?;
    Ok(SpanAnalysis { pep, fit, nli_w })
}

/// GSNR and OSNR of every channel of a span.
///
/// `target` is the power the closing amplifier restores (the next span's
/// launch, or this span's own launch at the end of a lightpath). NLI generated
/// at `launch` is carried to the amplifier output by the net span gain
/// `target/launch`.
#[allow(clippy::too_many_arguments)]
pub fn span_gsnr(
    span: &SpanSpec,
    grid: &ChannelGrid,
    launch: &LaunchProfile,
    received: &LaunchProfile,
    nli_launch_w: &[f64],
    target: &LaunchProfile,
    trx: &TransceiverSpec,
) -> Result<SpanNoiseBreakdown> {
    let n = grid.len();
    if launch.len() != n || received.len() != n || target.len() != n || nli_launch_w.len() != n {
        return Err(Error::InvalidParameter("span inputs are not aligned with the grid".into()));
    }
    let gains = amplifier_gains(received, target, span.lumped_loss_db)?;
    let mut out = SpanNoiseBreakdown {
        signal_w: target.powers().to_vec(),
        p_ase: Vec::with_capacity(n),
        p_nli: Vec::with_capacity(n),
        gain_db: gains.gain_db.clone(),
        gain_clamped: gains.clamped.clone(),
        gsnr_db: Vec::with_capacity(n),
        osnr_db: Vec::with_capacity(n),
    };
    for (i, ch) in grid.channels().iter().enumerate() {
        let nf = span.amplifiers.for_band(ch.band).noise_figure_lin();
        let ase = ase_power(gains.linear(i), nf, ch.center_hz, trx.symbol_rate_baud)?;
        let p = target.powers()[i];
        let launch_i = launch.powers()[i];
        let nli = if launch_i > 0.0 { nli_launch_w[i] * p / launch_i } else { 0.0 };
        out.p_ase.push(ase);
        out.p_nli.push(nli);
        out.gsnr_db.push(lin_to_db(p / (ase + nli)));
        out.osnr_db.push(lin_to_db(p / ase));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::physics::{BandName, Channel, FiberSpec};

    fn one_channel() -> (SpanSpec, ChannelGrid) {
        let grid = ChannelGrid::from_channels(
            vec![Channel { index: 0, center_hz: 193.4e12, band: BandName::C, bandwidth_hz: 75e9 }],
            75e9,
        )
        .unwrap();
        (SpanSpec::new(70.0, Arc::new(FiberSpec::ssmf_default())), grid)
    }

    #[test]
    fn zero_nli_gives_gsnr_equal_osnr() {
        let (span, grid) = one_channel();
        let tx = LaunchProfile::flat_dbm(1, 0.0);
        let rx = LaunchProfile::flat_dbm(1, -14.0);
        let b = span_gsnr(&span, &grid, &tx, &rx, &[0.0], &tx, &TransceiverSpec::default()).unwrap();
        assert_eq!(b.gsnr_db[0], b.osnr_db[0]);
        assert!((b.gain_db[0] - 14.0).abs() < 1e-12);
    }

    #[test]
    fn arithmetic_of_the_ratio() {
        // P = 1 mW, ASE = NLI = 5 µW → GSNR 20 dB, OSNR 23.01 dB
        let (span, grid) = one_channel();
        let tx = LaunchProfile::flat_dbm(1, 0.0);
        let trx = TransceiverSpec::default();
        let nf = span.amplifiers.for_band(BandName::C).noise_figure_lin();
        let unit = ase_power(2.0, nf, 193.4e12, trx.symbol_rate_baud).unwrap();
        // choose the received power so the amplifier's ASE is exactly 5 µW
        let g = 1.0 + 5e-6 / unit;
        let rx = LaunchProfile::new(vec![1e-3 / g]).unwrap();
        let b = span_gsnr(&span, &grid, &tx, &rx, &[5e-6], &tx, &trx).unwrap();
        assert!((b.p_ase[0] - 5e-6).abs() < 1e-15);
        assert!((b.gsnr_db[0] - 20.0).abs() < 1e-9);
        assert!((b.osnr_db[0] - 23.0103).abs() < 1e-4);
    }

    #[test]
    fn misaligned_inputs_rejected() {
        let (span, grid) = one_channel();
        let tx = LaunchProfile::flat_dbm(2, 0.0);
        assert!(span_gsnr(&span, &grid, &tx, &tx, &[0.0, 0.0], &tx, &TransceiverSpec::default()).is_err());
    }
}
