use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_CARDINALITY: u8 = 6;

/// Line-card interface: symbol rate, pulse shape and the GSNR ladder that
/// maps to modulation cardinality `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransceiverSpec {
    pub symbol_rate_baud: f64,
    pub roll_off: f64,
    pub fec_overhead: f64,
    pub snr_trx_db: f64,
    /// Required GSNR in dB for m = 1, 2, ...
    pub required_gsnr_db: Vec<f64>,
    /// Nominal interface rate per unit of cardinality.
    pub rate_per_cardinality_bps: f64,
}

impl Default for TransceiverSpec {
    fn default() -> Self {
        TransceiverSpec {
            symbol_rate_baud: 64e9,
            roll_off: 0.05,
            fec_overhead: 0.25,
            snr_trx_db: 26.0,
            required_gsnr_db: vec![3.45, 6.5, 8.4, 12.4, 16.5, 19.3],
            rate_per_cardinality_bps: 100e9,
        }
    }
}

impl TransceiverSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.symbol_rate_baud > 0.0) || !(self.roll_off >= 0.0) {
            return Err(Error::InvalidParameter("symbol rate must be positive and roll-off non-negative".into()));
        }
        if !(0.0..1.0).contains(&self.fec_overhead) {
            return Err(Error::InvalidParameter("FEC overhead must lie in [0, 1)".into()));
        }
        if self.required_gsnr_db.is_empty() || self.required_gsnr_db.len() > MAX_CARDINALITY as usize {
            return Err(Error::InvalidParameter(format!("need between 1 and {MAX_CARDINALITY} GSNR thresholds")));
        }
        if self.required_gsnr_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("GSNR thresholds must increase strictly with m".into()));
        }
        if !(self.rate_per_cardinality_bps > 0.0) {
            return Err(Error::InvalidParameter("rate per cardinality must be positive".into()));
        }
        Ok(())
    }

    pub fn max_cardinality(&self) -> u8 {
        self.required_gsnr_db.len() as u8
    }

    /// Nominal LCI rate `m × 100 Gb/s`.
    pub fn lci_rate_bps(&self, m: u8) -> f64 {
        m as f64 * self.rate_per_cardinality_bps
    }

    /// Threshold of cardinality `m` (1-based).
    pub fn threshold_db(&self, m: u8) -> Option<f64> {
        (m >= 1).then(|| self.required_gsnr_db.get(m as usize - 1).copied()).flatten()
    }

    /// `m·R_s·(1+ρ)·(1−θ)`; kept for reference, the nominal ladder is used
    /// for capacity accounting.
    pub fn formula_line_rate_bps(&self, m: u8) -> f64 {
        m as f64 * self.symbol_rate_baud * (1.0 + self.roll_off) * (1.0 - self.fec_overhead)
    }

    pub fn snr_trx_lin(&self) -> f64 {
        crate::units::db_to_lin(self.snr_trx_db)
    }
}

/// Slot-rounded channel bandwidth and the nominal LCI rate for cardinality `m`.
pub fn channel_bandwidth_and_rate(trx: &TransceiverSpec, base_slot_hz: f64, m: u8) -> Result<(f64, f64)> {
    if !(1..=trx.max_cardinality()).contains(&m) {
        return Err(Error::InvalidParameter(format!("cardinality {m} outside 1..={}", trx.max_cardinality())));
    }
    if !(base_slot_hz > 0.0) {
        return Err(Error::InvalidParameter("base slot must be positive".into()));
    }
    let slots = trx.symbol_rate_baud * (1.0 + trx.roll_off) / base_slot_hz;
    // exact fits must not round up because of representation error
    let slots = (slots - 1e-9).ceil().max(1.0);
    Ok((slots * base_slot_hz, trx.lci_rate_bps(m)))
}

/// Largest `m` whose threshold does not exceed `gsnr_db`; 0 when infeasible.
pub fn modulation_from_gsnr(gsnr_db: f64, trx: &TransceiverSpec) -> u8 {
    trx.required_gsnr_db.iter().take_while(|&&t| t <= gsnr_db).count() as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_are_inclusive() {
        let trx = TransceiverSpec::default();
        assert_eq!(modulation_from_gsnr(19.3, &trx), 6);
        assert_eq!(modulation_from_gsnr(3.0, &trx), 0);
        assert_eq!(modulation_from_gsnr(12.39, &trx), 3);
        assert_eq!(modulation_from_gsnr(3.45, &trx), 1);
        assert_eq!(modulation_from_gsnr(f64::NEG_INFINITY, &trx), 0);
        assert_eq!(modulation_from_gsnr(f64::NAN, &trx), 0);
        assert_eq!(modulation_from_gsnr(40.0, &trx), 6);
    }

    #[test]
    fn bandwidth_ceiling() {
        let trx = TransceiverSpec::default();
        let (b, r) = channel_bandwidth_and_rate(&trx, 12.5e9, 6).unwrap();
        assert_eq!(b, 75e9);
        assert_eq!(r, 600e9);
        let exact = TransceiverSpec { symbol_rate_baud: 12.5e9, roll_off: 0.0, ..trx };
        assert_eq!(channel_bandwidth_and_rate(&exact, 12.5e9, 1).unwrap(), (12.5e9, 100e9));
    }

    #[test]
    fn cardinality_out_of_range() {
        let trx = TransceiverSpec::default();
        assert!(channel_bandwidth_and_rate(&trx, 12.5e9, 0).is_err());
        assert!(channel_bandwidth_and_rate(&trx, 12.5e9, 7).is_err());
    }

    #[test]
    fn validation() {
        TransceiverSpec::default().validate().unwrap();
        let bad = TransceiverSpec { required_gsnr_db: vec![3.0, 3.0], ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn printed_rate_formula_differs_from_ladder() {
        // 6 · 64 GBd · 1.05 · 0.75 ≈ 302 Gb/s, not 600 Gb/s
        let trx = TransceiverSpec::default();
        assert!((trx.formula_line_rate_bps(6) - 302.4e9).abs() < 1e3);
        assert_eq!(trx.lci_rate_bps(6), 600e9);
    }
}
