use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::units::{db_per_km_to_neper_per_m, wavelength_to_frequency, SPEED_OF_LIGHT};

use super::{ChannelGrid, RamanProfile, SampledProfile};

const SSMF_LOSS_CSV: &str = include_str!("../../data/ssmf_loss.csv");
const SSMF_AEFF_CSV: &str = include_str!("../../data/ssmf_aeff.csv");

/// Frequency-dependent description of one fiber type.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpec {
    /// Attenuation in dB/km versus frequency in Hz.
    pub loss_db_per_km: SampledProfile,
    /// Effective area in m² versus frequency in Hz.
    pub aeff_m2: SampledProfile,
    pub raman: RamanProfile,
    /// s²/m
    pub beta2: f64,
    /// s³/m
    pub beta3: f64,
    /// s⁴/m
    pub beta4: f64,
    /// Reference frequency of the dispersion coefficients (1550 nm).
    pub f0_hz: f64,
    /// Kerr index, m²/W.
    pub n2: f64,
}

impl FiberSpec {
    pub const BETA2: f64 = -21.86e-27;
    pub const BETA3: f64 = 0.1331e-39;
    pub const BETA4: f64 = -2.7e-55;
    pub const N2: f64 = 2.6e-20;

    /// Standard single-mode fiber with the bundled representative tables.
    pub fn ssmf_default() -> Self {
        let parse = |s: &str| SampledProfile::from_csv_reader(s.as_bytes()).expect("bundled fiber table is valid");
        let fiber = FiberSpec {
            loss_db_per_km: parse(SSMF_LOSS_CSV),
            aeff_m2: parse(SSMF_AEFF_CSV),
            raman: RamanProfile::ssmf_default(),
            beta2: Self::BETA2,
            beta3: Self::BETA3,
            beta4: Self::BETA4,
            f0_hz: wavelength_to_frequency(1550e-9),
            n2: Self::N2,
        };
        fiber.validate_tables().expect("bundled fiber tables are valid");
        fiber
    }

    /// Default dispersion and Kerr constants with tables read from CSV files.
    pub fn from_files(
        loss_csv: impl AsRef<Path>,
        aeff_csv: impl AsRef<Path>,
        raman_csv: impl AsRef<Path>,
        raman_reference_pump_hz: f64,
        pump_scaling: bool,
    ) -> Result<Self> {
        let raman =
            RamanProfile::new(raman_reference_pump_hz, SampledProfile::from_csv_path(raman_csv)?, pump_scaling)?;
        let fiber = FiberSpec {
            loss_db_per_km: SampledProfile::from_csv_path(loss_csv)?,
            aeff_m2: SampledProfile::from_csv_path(aeff_csv)?,
            raman,
            ..Self::ssmf_default()
        };
        fiber.validate_tables()?;
        Ok(fiber)
    }

    /// Frequency-flat loss and effective area; handy for analytic checks.
    pub fn flat(alpha_db_per_km: f64, aeff_m2: f64, raman: RamanProfile, f_lo_hz: f64, f_hi_hz: f64) -> Result<Self> {
        let xs = vec![f_lo_hz, f_hi_hz];
        let fiber = FiberSpec {
            loss_db_per_km: SampledProfile::new(xs.clone(), vec![alpha_db_per_km; 2])?,
            aeff_m2: SampledProfile::new(xs, vec![aeff_m2; 2])?,
            raman,
            ..Self::ssmf_default()
        };
        if alpha_db_per_km < 0.0 {
            return Err(Error::InvalidTable("negative loss".into()));
        }
        if !(aeff_m2 > 0.0) {
            return Err(Error::InvalidTable("effective area must be positive".into()));
        }
        Ok(fiber)
    }

    fn validate_tables(&self) -> Result<()> {
        if self.loss_db_per_km.ys().iter().any(|&a| !(a > 0.0)) {
            return Err(Error::InvalidTable("loss values must be positive".into()));
        }
        if self.aeff_m2.ys().iter().any(|&a| !(a > 0.0)) {
            return Err(Error::InvalidTable("effective area must be positive".into()));
        }
        Ok(())
    }

    /// Checks that every table covers the grid and the grid's Raman offsets.
    pub fn check_covers(&self, grid: &ChannelGrid) -> Result<()> {
        let (lo, hi) = (grid.min_frequency(), grid.max_frequency());
        if !self.loss_db_per_km.covers(lo, hi) {
            return Err(Error::InvalidTable(format!("loss table does not cover [{lo:.6e}, {hi:.6e}] Hz")));
        }
        if !self.aeff_m2.covers(lo, hi) {
            return Err(Error::InvalidTable(format!("effective-area table does not cover [{lo:.6e}, {hi:.6e}] Hz")));
        }
        if self.raman.max_offset_hz() < hi - lo {
            return Err(Error::InvalidTable(format!(
                "Raman table stops at {:.3e} Hz, grid spans {:.3e} Hz",
                self.raman.max_offset_hz(),
                hi - lo
            )));
        }
        Ok(())
    }

    /// Power attenuation in 1/m.
    pub fn alpha(&self, f_hz: f64) -> Result<f64> {
        Ok(db_per_km_to_neper_per_m(self.loss_db_per_km.at(f_hz)?))
    }

    pub fn alpha_db_per_km(&self, f_hz: f64) -> Result<f64> {
        self.loss_db_per_km.at(f_hz)
    }

    pub fn aeff(&self, f_hz: f64) -> Result<f64> {
        self.aeff_m2.at(f_hz)
    }

    /// Dispersion seen by the pair (f_i, f_j), expanded to fourth order
    /// around `f0`.
    pub fn effective_beta2(&self, f_i: f64, f_j: f64) -> f64 {
        let di = f_i - self.f0_hz;
        let dj = f_j - self.f0_hz;
        self.beta2 + PI * self.beta3 * (di + dj) + (2.0 * PI * PI / 3.0) * self.beta4 * (di * di + di * dj + dj * dj)
    }

    /// Nonlinear coefficient of channel `i` perturbed by channel `j`, 1/(W·m).
    pub fn pair_gamma(&self, f_i: f64, f_j: f64) -> Result<f64> {
        let a = self.aeff(f_i)? + self.aeff(f_j)?;
        Ok(2.0 * PI * f_i / SPEED_OF_LIGHT * 2.0 * self.n2 / a)
    }
}
