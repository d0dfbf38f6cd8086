use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{GHZ, THZ};

/// Transmission band. Variants are declared in ascending frequency order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BandName {
    L,
    C,
    S,
}

impl BandName {
    pub const ALL: [BandName; 3] = [BandName::L, BandName::C, BandName::S];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BandName::L => "L",
            BandName::C => "C",
            BandName::S => "S",
        }
    }
}

impl std::fmt::Display for BandName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub name: BandName,
    pub width_hz: f64,
}

/// Spectral allocation: contiguous bands separated by guard gaps, starting at
/// `start_hz` (lower edge of the first band).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPlan {
    pub start_hz: f64,
    pub bands: Vec<Band>,
    pub inter_band_gap_hz: f64,
    pub channel_spacing_hz: f64,
    pub base_slot_hz: f64,
}

impl BandPlan {
    /// 6 THz L + 6 THz C + 8 THz S with 400 GHz gaps and a 75 GHz grid.
    pub fn lcs() -> Self {
        BandPlan {
            start_hz: 184.5 * THZ,
            bands: vec![
                Band { name: BandName::L, width_hz: 6.0 * THZ },
                Band { name: BandName::C, width_hz: 6.0 * THZ },
                Band { name: BandName::S, width_hz: 8.0 * THZ },
            ],
            inter_band_gap_hz: 400.0 * GHZ,
            channel_spacing_hz: 75.0 * GHZ,
            base_slot_hz: 12.5 * GHZ,
        }
    }

    pub fn lc() -> Self {
        let mut plan = Self::lcs();
        plan.bands.truncate(2);
        plan
    }

    pub fn c_only() -> Self {
        BandPlan { start_hz: 190.9 * THZ, bands: vec![Band { name: BandName::C, width_hz: 6.0 * THZ }], ..Self::lcs() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bands.is_empty() {
            return Err(Error::InvalidBandPlan("no bands".into()));
        }
        if !(self.start_hz > 0.0) {
            return Err(Error::InvalidBandPlan("start frequency must be positive".into()));
        }
        if !(self.channel_spacing_hz > 0.0 && self.base_slot_hz > 0.0) {
            return Err(Error::InvalidBandPlan("channel spacing and base slot must be positive".into()));
        }
        if !(self.inter_band_gap_hz >= 0.0) {
            return Err(Error::InvalidBandPlan("negative inter-band gap".into()));
        }
        let slots = self.channel_spacing_hz / self.base_slot_hz;
        if (slots - slots.round()).abs() > 1e-9 || slots.round() < 1.0 {
            return Err(Error::InvalidBandPlan(format!(
                "channel spacing {} Hz is not an integer multiple of base slot {} Hz",
                self.channel_spacing_hz, self.base_slot_hz
            )));
        }
        for pair in self.bands.windows(2) {
            if pair[0].name >= pair[1].name {
                return Err(Error::InvalidBandPlan(format!(
                    "bands must be listed once each in ascending frequency order, got {} before {}",
                    pair[0].name, pair[1].name
                )));
            }
        }
        for band in &self.bands {
            if !(band.width_hz > 0.0) {
                return Err(Error::InvalidBandPlan(format!("band {} has non-positive width", band.name)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Channel {
    pub index: usize,
    pub center_hz: f64,
    pub band: BandName,
    pub bandwidth_hz: f64,
}

/// Ordered set of channel slots, ascending in frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGrid {
    channels: Vec<Channel>,
    spacing_hz: f64,
}

impl ChannelGrid {
    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn spacing_hz(&self) -> f64 {
        self.spacing_hz
    }

    pub fn channel(&self, i: usize) -> &Channel {
        &self.channels[i]
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.channels.iter().map(|c| c.center_hz).collect()
    }

    pub fn bands(&self) -> Vec<BandName> {
        let mut out: Vec<BandName> = self.channels.iter().map(|c| c.band).collect();
        out.dedup();
        out
    }

    /// Channel indices belonging to `band`, in ascending order.
    pub fn indices_in(&self, band: BandName) -> impl Iterator<Item = usize> + '_ {
        self.channels.iter().filter(move |c| c.band == band).map(|c| c.index)
    }

    pub fn min_frequency(&self) -> f64 {
        self.channels.first().map_or(0.0, |c| c.center_hz)
    }

    pub fn max_frequency(&self) -> f64 {
        self.channels.last().map_or(0.0, |c| c.center_hz)
    }

    /// Index of the channel closest to the middle of `band`.
    pub fn center_of_band(&self, band: BandName) -> Option<usize> {
        let idx: Vec<usize> = self.indices_in(band).collect();
        if idx.is_empty() {
            return None;
        }
        Some(idx[(idx.len() - 1) / 2])
    }

    /// Sub-grid restricted to one band; indices are renumbered from zero.
    pub fn restrict_to(&self, band: BandName) -> ChannelGrid {
        let channels = self
            .channels
            .iter()
            .filter(|c| c.band == band)
            .enumerate()
            .map(|(k, c)| Channel { index: k, ..*c })
            .collect();
        ChannelGrid { channels, spacing_hz: self.spacing_hz }
    }

    /// Grid from explicit channels. Used for single-channel and synthetic studies.
    pub fn from_channels(channels: Vec<Channel>, spacing_hz: f64) -> Result<ChannelGrid> {
        for (k, c) in channels.iter().enumerate() {
            if c.index != k {
                return Err(Error::InvalidParameter(format!("channel at position {k} carries index {}", c.index)));
            }
            if !(c.bandwidth_hz > 0.0 && c.center_hz > 0.0) {
                return Err(Error::InvalidParameter(format!("channel {k} needs positive frequency and bandwidth")));
            }
        }
        if channels.windows(2).any(|w| w[1].center_hz <= w[0].center_hz) {
            return Err(Error::InvalidParameter("channel frequencies must be strictly increasing".into()));
        }
        Ok(ChannelGrid { channels, spacing_hz })
    }
}

/// Lays out `floor(width / spacing)` channels per band, centred in the band.
pub fn build_channel_grid(plan: &BandPlan) -> Result<ChannelGrid> {
    plan.validate()?;
    let spacing = plan.channel_spacing_hz;
    let mut channels = Vec::new();
    let mut band_lo = plan.start_hz;
    for (b, band) in plan.bands.iter().enumerate() {
        if b > 0 {
            band_lo += plan.inter_band_gap_hz;
        }
        // tolerate round-off when the width is an exact multiple
        let count = (band.width_hz / spacing + 1e-9).floor() as usize;
        if count == 0 {
            return Err(Error::BandTooNarrow {
                band: band.name.to_string(),
                width_hz: band.width_hz,
                spacing_hz: spacing,
            });
        }
        let margin = band.width_hz - count as f64 * spacing;
        let first = band_lo + 0.5 * margin + 0.5 * spacing;
        for k in 0..count {
            channels.push(Channel {
                index: channels.len(),
                center_hz: first + k as f64 * spacing,
                band: band.name,
                bandwidth_hz: spacing,
            });
        }
        band_lo += band.width_hz;
    }
    Ok(ChannelGrid { channels, spacing_hz: spacing })
}
