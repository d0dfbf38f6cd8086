use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid band plan: {0}")]
    InvalidBandPlan(String),

    #[error("band {band} is {width_hz:.3e} Hz wide, narrower than one {spacing_hz:.3e} Hz channel")]
    BandTooNarrow { band: String, width_hz: f64, spacing_hz: f64 },

    #[error("query {value:.6e} outside tabulated range [{min:.6e}, {max:.6e}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("invalid profile table: {0}")]
    InvalidTable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("solver diverged at z = {z_m:.1} m (channel {channel}); try a smaller integration step")]
    SolverDivergence { z_m: f64, channel: usize },

    #[error("degenerate loss fit for channel {channel}: {reason}")]
    DegenerateFit { channel: usize, reason: String },

    #[error("amplifier gain {gain:.6} is below unity")]
    GainBelowUnity { gain: f64 },

    #[error("lightpath is infeasible: {0}")]
    InfeasibleLightpath(String),

    #[error("empty power scan: {0}")]
    EmptyScan(String),

    #[error("launch cap {p_max_dbm} dBm is below the first candidate {first_dbm:.2} dBm")]
    LaunchCapViolated { p_max_dbm: f64, first_dbm: f64 },

    #[error("topology schema error: {0}")]
    TopologySchema(String),

    #[error("core nodes are not connected: {0}")]
    DisconnectedCore(String),

    #[error("link {a}-{b} has zero or negative length")]
    ZeroLengthLink { a: u32, b: u32 },

    #[error("link {a}-{b}: spans sum to {span_sum_km:.3} km but link length is {length_km:.3} km")]
    SpanLengthMismatch { a: u32, b: u32, span_sum_km: f64, length_km: f64 },

    #[error("topology needs at least two core nodes, found {0}")]
    TooFewCoreNodes(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
