use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::db_to_lin;

use super::BandName;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplifierSpec {
    pub band: BandName,
    pub noise_figure_db: f64,
    pub max_output_power_dbm: f64,
    #[serde(default = "default_booster_gain")]
    pub booster_gain_db: f64,
}

fn default_booster_gain() -> f64 {
    20.0
}

impl AmplifierSpec {
    /// EDFA/TDFA defaults: L 5 dB, C 4.5 dB, S 6 dB noise figure.
    pub fn default_for(band: BandName) -> Self {
        let noise_figure_db = match band {
            BandName::L => 5.0,
            BandName::C => 4.5,
            BandName::S => 6.0,
        };
        AmplifierSpec { band, noise_figure_db, max_output_power_dbm: 25.0, booster_gain_db: default_booster_gain() }
    }

    pub fn noise_figure_lin(&self) -> f64 {
        db_to_lin(self.noise_figure_db)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_figure_db >= 3.0) {
            return Err(Error::InvalidParameter(format!(
                "{}-band noise figure {} dB is below the 3 dB quantum limit",
                self.band, self.noise_figure_db
            )));
        }
        if !self.max_output_power_dbm.is_finite() || !self.booster_gain_db.is_finite() {
            return Err(Error::InvalidParameter(format!("{}-band amplifier has non-finite settings", self.band)));
        }
        Ok(())
    }
}

/// One amplifier specification per band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amplifiers {
    specs: Vec<AmplifierSpec>,
}

impl Default for Amplifiers {
    fn default() -> Self {
        Amplifiers { specs: BandName::ALL.iter().map(|&b| AmplifierSpec::default_for(b)).collect() }
    }
}

impl Amplifiers {
    /// Overrides the defaults with the given specs (at most one per band).
    pub fn new(specs: impl IntoIterator<Item = AmplifierSpec>) -> Result<Self> {
        let mut out = Self::default();
        for spec in specs {
            spec.validate()?;
            let band = spec.band;
            out.specs[band.index()] = spec;
        }
        Ok(out)
    }

    pub fn for_band(&self, band: BandName) -> &AmplifierSpec {
        &self.specs[band.index()]
    }

    pub fn for_band_mut(&mut self, band: BandName) -> &mut AmplifierSpec {
        &mut self.specs[band.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &AmplifierSpec> {
        self.specs.iter()
    }

    pub fn validate(&self) -> Result<()> {
        self.specs.iter().try_for_each(AmplifierSpec::validate)
    }
}
