use crate::error::{Error, Result};
use crate::units::THZ;

use super::SampledProfile;

const SSMF_RAMAN_CSV: &str = include_str!("../../data/ssmf_raman.csv");

/// Raman gain coefficient `C_r(f_pump, Δf)` in 1/(W·m).
///
/// Tabulated for `Δf ≥ 0` at a reference pump; negative offsets follow from
/// odd symmetry. With `pump_scaling` enabled the curve is scaled linearly with
/// the pump frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct RamanProfile {
    reference_pump_hz: f64,
    gain: SampledProfile,
    pump_scaling: bool,
}

impl RamanProfile {
    pub fn new(reference_pump_hz: f64, gain: SampledProfile, pump_scaling: bool) -> Result<Self> {
        if !(reference_pump_hz > 0.0) {
            return Err(Error::InvalidTable("reference pump must be positive".into()));
        }
        if gain.x_min() != 0.0 {
            return Err(Error::InvalidTable("Raman table must start at a zero frequency offset".into()));
        }
        if gain.ys()[0] != 0.0 {
            return Err(Error::InvalidTable("Raman gain must vanish at zero frequency offset".into()));
        }
        Ok(RamanProfile { reference_pump_hz, gain, pump_scaling })
    }

    /// Bundled SSMF-like curve (13.5 THz peak, 205 THz reference pump).
    pub fn ssmf_default() -> Self {
        let table = SampledProfile::from_csv_reader(SSMF_RAMAN_CSV.as_bytes()).expect("bundled Raman table is valid");
        Self::new(205.0 * THZ, table, true).expect("bundled Raman table is valid")
    }

    /// Triangular curve: linear rise to `peak` at `peak_offset_hz`, linear
    /// fall to zero at `cutoff_hz`.
    pub fn triangular(
        reference_pump_hz: f64,
        peak: f64,
        peak_offset_hz: f64,
        cutoff_hz: f64,
        pump_scaling: bool,
    ) -> Result<Self> {
        if !(0.0 < peak_offset_hz && peak_offset_hz < cutoff_hz) {
            return Err(Error::InvalidTable("triangular profile needs 0 < peak offset < cutoff".into()));
        }
        let table = SampledProfile::new(vec![0.0, peak_offset_hz, cutoff_hz], vec![0.0, peak, 0.0])?;
        Self::new(reference_pump_hz, table, pump_scaling)
    }

    /// Identically zero gain over `[0, max_offset_hz]`.
    pub fn zero(max_offset_hz: f64) -> Self {
        let table = SampledProfile::new(vec![0.0, max_offset_hz], vec![0.0, 0.0]).expect("valid zero table");
        Self::new(200.0 * THZ, table, false).expect("valid zero table")
    }

    pub fn reference_pump_hz(&self) -> f64 {
        self.reference_pump_hz
    }

    pub fn pump_scaling(&self) -> bool {
        self.pump_scaling
    }

    pub fn with_pump_scaling(mut self, on: bool) -> Self {
        self.pump_scaling = on;
        self
    }

    pub fn max_offset_hz(&self) -> f64 {
        self.gain.x_max()
    }

    pub fn table(&self) -> &SampledProfile {
        &self.gain
    }

    pub fn gain(&self, f_pump_hz: f64, delta_f_hz: f64) -> Result<f64> {
        let magnitude = self.gain.at(delta_f_hz.abs())?;
        let scale = if self.pump_scaling { f_pump_hz / self.reference_pump_hz } else { 1.0 };
        // the table vanishes at zero, so signum(±0) never matters
        Ok(delta_f_hz.signum() * scale * magnitude)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_offset_gives_zero() {
        let r = RamanProfile::ssmf_default();
        assert_eq!(r.gain(200.0 * THZ, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn odd_symmetry_at_samples() {
        let r = RamanProfile::ssmf_default();
        for &d in r.table().xs().iter().step_by(7) {
            let fp = 201.3 * THZ;
            assert_eq!(r.gain(fp, -d).unwrap(), -r.gain(fp, d).unwrap());
        }
    }

    #[test]
    fn linear_pump_scaling() {
        let r = RamanProfile::ssmf_default();
        let fr = r.reference_pump_hz();
        let d = 9.3 * THZ;
        let g1 = r.gain(fr, d).unwrap();
        let g2 = r.gain(2.0 * fr, d).unwrap();
        assert!((g2 - 2.0 * g1).abs() <= 1e-18);
        let off = r.clone().with_pump_scaling(false);
        assert_eq!(off.gain(2.0 * fr, d).unwrap(), g1);
    }

    #[test]
    fn default_peak_near_13_thz() {
        let r = RamanProfile::ssmf_default();
        let (k, _) =
            r.table().ys().iter().enumerate().fold((0, f64::MIN), |acc, (k, &y)| if y > acc.1 { (k, y) } else { acc });
        let peak = r.table().xs()[k];
        assert!((12.5 * THZ..14.5 * THZ).contains(&peak));
    }

    #[test]
    fn offset_beyond_table_is_error() {
        let r = RamanProfile::triangular(200.0 * THZ, 1e-4, 13.0 * THZ, 20.0 * THZ, false).unwrap();
        assert!(r.gain(200.0 * THZ, -21.0 * THZ).is_err());
        assert!((r.gain(200.0 * THZ, 6.5 * THZ).unwrap() - 0.5e-4).abs() < 1e-18);
    }

    #[test]
    fn nonzero_origin_rejected() {
        let t = SampledProfile::new(vec![0.0, 1.0], vec![1e-5, 0.0]).unwrap();
        assert!(RamanProfile::new(200.0 * THZ, t, false).is_err());
    }
}
