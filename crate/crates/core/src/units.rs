//! Unit conversions and physical constants.
//!
//! Everything internal is SI: Hz, W, m, and power attenuation in 1/m.
//! Decibel quantities only appear at the edges.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;

pub const THZ: f64 = 1e12;
pub const GHZ: f64 = 1e9;

#[inline]
pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn lin_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

#[inline]
pub fn dbm_to_w(dbm: f64) -> f64 {
    1e-3 * db_to_lin(dbm)
}

#[inline]
pub fn w_to_dbm(w: f64) -> f64 {
    lin_to_db(w / 1e-3)
}

/// dB/km to power attenuation in 1/m.
#[inline]
pub fn db_per_km_to_neper_per_m(alpha_db_km: f64) -> f64 {
    alpha_db_km * std::f64::consts::LN_10 / 1e4
}

#[inline]
pub fn neper_per_m_to_db_per_km(alpha: f64) -> f64 {
    alpha * 1e4 / std::f64::consts::LN_10
}

/// Natural-log power ratio expressed in dB.
#[inline]
pub fn neper_to_db(x: f64) -> f64 {
    x * 10.0 / std::f64::consts::LN_10
}

/// Frequency of a vacuum wavelength.
#[inline]
pub fn wavelength_to_frequency(lambda_m: f64) -> f64 {
    SPEED_OF_LIGHT / lambda_m
}
