use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::lin_to_db;

use super::{SpanNoiseBreakdown, TransceiverSpec};

/// Line-system penalties and the ranges lumped span losses are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PenaltyConfig {
    /// Filtering penalty, dB per traversed ROADM (or once per lightpath).
    pub filtering_penalty_db: f64,
    pub filtering_per_roadm: bool,
    pub aging_margin_db: f64,
    pub connector_loss_db: (f64, f64),
    pub connectors_per_span: u32,
    pub splice_loss_db_per_km: (f64, f64),
    pub splice_section_km: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            filtering_penalty_db: 0.5,
            filtering_per_roadm: true,
            aging_margin_db: 1.0,
            connector_loss_db: (0.2, 0.5),
            connectors_per_span: 2,
            splice_loss_db_per_km: (0.01, 0.06),
            splice_section_km: 2.0,
        }
    }
}

impl PenaltyConfig {
    /// No penalties and no lumped losses.
    pub fn none() -> Self {
        PenaltyConfig {
            filtering_penalty_db: 0.0,
            aging_margin_db: 0.0,
            connector_loss_db: (0.0, 0.0),
            splice_loss_db_per_km: (0.0, 0.0),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ordered = |(lo, hi): (f64, f64)| lo >= 0.0 && hi >= lo;
        if !(self.filtering_penalty_db >= 0.0 && self.aging_margin_db >= 0.0)
            || !ordered(self.connector_loss_db)
            || !ordered(self.splice_loss_db_per_km)
            || !(self.splice_section_km > 0.0)
        {
            return Err(Error::InvalidParameter("penalties must be non-negative with ordered ranges".into()));
        }
        Ok(())
    }

    pub fn filtering_db(&self, roadm_hops: usize) -> f64 {
        if self.filtering_per_roadm {
            roadm_hops as f64 * self.filtering_penalty_db
        } else if roadm_hops > 0 {
            self.filtering_penalty_db
        } else {
            0.0
        }
    }

    /// Connector plus splice loss for one span; one splice-rate draw per
    /// splice section.
    pub fn draw_lumped_loss_db<R: Rng + ?Sized>(&self, rng: &mut R, length_km: f64) -> f64 {
        let uniform = |rng: &mut R, (lo, hi): (f64, f64)| {
            if hi > lo {
                rng.gen_range(lo..=hi)
            } else {
                lo
            }
        };
        let connectors: f64 = (0..self.connectors_per_span).map(|_| uniform(rng, self.connector_loss_db)).sum();
        let mut splices = 0.0;
        let mut remaining = length_km;
        while remaining > 1e-9 {
            let section = remaining.min(self.splice_section_km);
            splices += uniform(rng, self.splice_loss_db_per_km) * section;
            remaining -= section;
        }
        connectors + splices
    }

    /// Expected lumped loss of a span.
    pub fn mean_lumped_loss_db(&self, length_km: f64) -> f64 {
        let mid = |(lo, hi): (f64, f64)| 0.5 * (lo + hi);
        self.connectors_per_span as f64 * mid(self.connector_loss_db) + mid(self.splice_loss_db_per_km) * length_km
    }
}

/// `10 log10[(Σ 1/GSNR_span + 1/SNR_TRx)^-1]` minus filtering and aging.
pub fn combine_inverse_gsnr(
    inverse_gsnr_sum: f64,
    penalties: &PenaltyConfig,
    trx: &TransceiverSpec,
    roadm_hops: usize,
) -> f64 {
    let total = inverse_gsnr_sum + 1.0 / trx.snr_trx_lin();
    lin_to_db(1.0 / total) - penalties.filtering_db(roadm_hops) - penalties.aging_margin_db
}

/// End-to-end GSNR of `channel` over a chain of spans, in dB.
pub fn lightpath_gsnr(
    spans: &[SpanNoiseBreakdown],
    channel: usize,
    penalties: &PenaltyConfig,
    trx: &TransceiverSpec,
    roadm_hops: usize,
) -> Result<f64> {
    if spans.is_empty() {
        return Err(Error::InfeasibleLightpath("no spans".into()));
    }
    let mut inv = 0.0;
    for (s, span) in spans.iter().enumerate() {
        if channel >= span.n_channels() {
            return Err(Error::InvalidParameter(format!("channel {channel} outside span {s}")));
        }
        let g = span.gsnr_lin(channel);
        if !(g > 0.0) {
            return Err(Error::InfeasibleLightpath(format!("span {s} has non-positive GSNR on channel {channel}")));
        }
        inv += 1.0 / g;
    }
    Ok(combine_inverse_gsnr(inv, penalties, trx, roadm_hops))
}
