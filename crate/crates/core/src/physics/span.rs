use std::sync::Arc;

use crate::error::{Error, Result};

use super::{Amplifiers, FiberSpec};

/// One amplified fiber span.
///
/// `lumped_loss_db` collects connector and splice losses. They do not enter
/// the propagation equations; the amplifier at the end of the span makes
/// them up, so they only raise the required gain.
#[derive(Debug, Clone)]
pub struct SpanSpec {
    pub length_m: f64,
    pub fiber: Arc<FiberSpec>,
    pub amplifiers: Amplifiers,
    pub lumped_loss_db: f64,
}

impl SpanSpec {
    pub fn new(length_km: f64, fiber: Arc<FiberSpec>) -> Self {
        SpanSpec { length_m: length_km * 1e3, fiber, amplifiers: Amplifiers::default(), lumped_loss_db: 0.0 }
    }

    pub fn with_lumped_loss_db(mut self, db: f64) -> Self {
        self.lumped_loss_db = db;
        self
    }

    pub fn with_amplifiers(mut self, amplifiers: Amplifiers) -> Self {
        self.amplifiers = amplifiers;
        self
    }

    pub fn length_km(&self) -> f64 {
        self.length_m / 1e3
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_m > 0.0 && self.length_m.is_finite()) {
            return Err(Error::InvalidParameter(format!("span length {} m must be positive", self.length_m)));
        }
        if !(self.lumped_loss_db >= 0.0) {
            return Err(Error::InvalidParameter("lumped loss must be non-negative".into()));
        }
        self.amplifiers.validate()
    }
}
