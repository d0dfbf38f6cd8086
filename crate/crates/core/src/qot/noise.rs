use crate::error::{Error, Result};
use crate::pep::LaunchProfile;
use crate::units::{db_to_lin, lin_to_db, PLANCK};

/// ASE power `n_F h f (G − 1) R_s` in W. `gain` and `noise_figure` are linear.
pub fn ase_power(gain: f64, noise_figure: f64, f_hz: f64, symbol_rate_baud: f64) -> Result<f64> {
    if !(gain >= 1.0) {
        return Err(Error::GainBelowUnity { gain });
    }
    Ok(noise_figure * PLANCK * f_hz * (gain - 1.0) * symbol_rate_baud)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplifierGains {
    pub gain_db: Vec<f64>,
    /// Channels whose target sat below the received power; gain clamped to 0 dB.
    pub clamped: Vec<bool>,
}

impl AmplifierGains {
    pub fn any_clamped(&self) -> bool {
        self.clamped.iter().any(|&c| c)
    }

    pub fn linear(&self, channel: usize) -> f64 {
        db_to_lin(self.gain_db[channel])
    }
}

/// Gain restoring each channel from `received` to `target`, plus the span's
/// lumped losses.
pub fn amplifier_gains(
    received: &LaunchProfile,
    target: &LaunchProfile,
    lumped_loss_db: f64,
) -> Result<AmplifierGains> {
    if received.len() != target.len() {
        return Err(Error::InvalidParameter(format!(
            "received has {} channels, target has {}",
            received.len(),
            target.len()
        )));
    }
    let mut gain_db = Vec::with_capacity(received.len());
    let mut clamped = Vec::with_capacity(received.len());
    for (i, (&rx, &tx)) in received.powers().iter().zip(target.powers()).enumerate() {
        if !(rx > 0.0) {
            return Err(Error::InvalidParameter(format!("channel {i} arrives with zero power")));
        }
        let g = lin_to_db(tx / rx) + lumped_loss_db;
        if g < 0.0 {
            log::warn!("channel {i}: target below received power, gain clamped to 0 dB");
            gain_db.push(0.0);
            clamped.push(true);
        } else {
            gain_db.push(g);
            clamped.push(false);
        }
    }
    Ok(AmplifierGains { gain_db, clamped })
}
