use serde::Serialize;

use crate::error::{Error, Result};
use crate::physics::{ChannelGrid, FiberSpec, SpanSpec};
use crate::units::{dbm_to_w, w_to_dbm};

pub const DEFAULT_STEP_M: f64 = 50.0;

/// Per-channel optical power in W, aligned with the grid indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LaunchProfile(Vec<f64>);

impl LaunchProfile {
    pub fn new(powers_w: Vec<f64>) -> Result<Self> {
        if let Some(i) = powers_w.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "channel {i} power {} W is not a finite non-negative value",
                powers_w[i]
            )));
        }
        Ok(LaunchProfile(powers_w))
    }

    pub fn flat_dbm(n_channels: usize, dbm: f64) -> Self {
        LaunchProfile(vec![dbm_to_w(dbm); n_channels])
    }

    pub fn from_dbm(dbm: &[f64]) -> Result<Self> {
        Self::new(dbm.iter().map(|&p| dbm_to_w(p)).collect())
    }

    pub fn powers(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_dbm(&self) -> Vec<f64> {
        self.0.iter().map(|&p| w_to_dbm(p)).collect()
    }

    pub fn max_dbm(&self) -> f64 {
        w_to_dbm(self.0.iter().copied().fold(0.0, f64::max))
    }

    pub fn total_w(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Every channel scaled by the same linear factor.
    pub fn scaled(&self, factor: f64) -> LaunchProfile {
        LaunchProfile(self.0.iter().map(|p| p * factor).collect())
    }
}

/// Sampled `P_i(z)` for every channel, stored z-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerEvolutionProfile {
    z_m: Vec<f64>,
    n_channels: usize,
    power_w: Vec<f64>,
}

impl PowerEvolutionProfile {
    pub fn new(z_m: Vec<f64>, n_channels: usize, power_w: Vec<f64>) -> Result<Self> {
        if z_m.is_empty() || n_channels == 0 || power_w.len() != z_m.len() * n_channels {
            return Err(Error::InvalidParameter("power evolution profile dimensions do not match".into()));
        }
        if z_m.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("z samples must be ascending".into()));
        }
        Ok(PowerEvolutionProfile { z_m, n_channels, power_w })
    }

    pub fn z(&self) -> &[f64] {
        &self.z_m
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_samples(&self) -> usize {
        self.z_m.len()
    }

    pub fn length_m(&self) -> f64 {
        self.z_m[self.z_m.len() - 1] - self.z_m[0]
    }

    /// Powers of all channels at sample `k`.
    pub fn row(&self, k: usize) -> &[f64] {
        &self.power_w[k * self.n_channels..(k + 1) * self.n_channels]
    }

    pub fn power(&self, k: usize, channel: usize) -> f64 {
        self.power_w[k * self.n_channels + channel]
    }

    pub fn channel_series(&self, channel: usize) -> impl Iterator<Item = f64> + '_ {
        self.power_w[channel..].iter().step_by(self.n_channels).copied()
    }

    pub fn launch(&self) -> LaunchProfile {
        LaunchProfile(self.row(0).to_vec())
    }

    pub fn received(&self) -> LaunchProfile {
        LaunchProfile(self.row(self.n_samples() - 1).to_vec())
    }
}

/// Power at the end of the span.
pub fn received_profile(pep: &PowerEvolutionProfile) -> LaunchProfile {
    pep.received()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Launch profile given at z = 0; integrate towards z = L.
    Forward,
    /// Received profile given at z = L; integrate back to z = 0.
    Backward,
}

/// Right-hand side of the coupled ISRS equations for one fiber and grid.
///
/// `dP_i/dz = P_i [ Σ_j K_ij P_j − α_i ]` with
/// `K_ij = ζ(f_i/f_j) C_r(f_j, f_j − f_i)`.
#[derive(Debug, Clone)]
pub struct PepSolver {
    n: usize,
    alpha: Vec<f64>,
    coupling: Vec<f64>,
}

fn zeta(x: f64) -> f64 {
    if x > 1.0 {
        x
    } else if x == 0.0 {
        0.0
    } else {
        1.0
    }
}

impl PepSolver {
    pub fn new(fiber: &FiberSpec, grid: &ChannelGrid) -> Result<Self> {
        let f = grid.frequencies();
        let n = f.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty channel grid".into()));
        }
        let alpha = f.iter().map(|&fi| fiber.alpha(fi)).collect::<Result<Vec<_>>>()?;
        let mut coupling = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let c = fiber.raman.gain(f[j], f[j] - f[i])?;
                coupling[i * n + j] = zeta(f[i] / f[j]) * c;
            }
        }
        Ok(PepSolver { n, alpha, coupling })
    }

    /// Solver with attenuation only (no Raman coupling).
    pub fn linear(alpha: Vec<f64>) -> Self {
        let n = alpha.len();
        PepSolver { n, alpha, coupling: vec![0.0; n * n] }
    }

    pub fn n_channels(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.coupling[i * self.n + j]
    }

    fn rhs(&self, p: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.coupling[i * self.n..(i + 1) * self.n];
            let gain: f64 = row.iter().zip(p).map(|(k, pj)| k * pj).sum();
            *o = p[i] * (gain - self.alpha[i]);
        }
    }

    /// Classical fixed-step RK4 over `[0, length_m]`.
    ///
    /// The step is shrunk so an integer number of steps covers the span; every
    /// step is kept in the returned profile, which is ascending in z whichever
    /// way it was integrated.
    pub fn solve(
        &self,
        boundary: &LaunchProfile,
        length_m: f64,
        direction: Direction,
        step_m: f64,
    ) -> Result<PowerEvolutionProfile> {
        let n = self.n;
        if boundary.len() != n {
            return Err(Error::InvalidParameter(format!("profile has {} channels, grid has {n}", boundary.len())));
        }
        if !(step_m > 0.0 && step_m.is_finite()) {
            return Err(Error::InvalidParameter(format!("step {step_m} m must be positive")));
        }
        if !(length_m > 0.0 && length_m.is_finite()) {
            return Err(Error::InvalidParameter(format!("span length {length_m} m must be positive")));
        }
        let steps = (length_m / step_m).ceil().max(1.0) as usize;
        let h = length_m / steps as f64;
        let signed_h = match direction {
            Direction::Forward => h,
            Direction::Backward => -h,
        };

        let mut out = Vec::with_capacity((steps + 1) * n);
        out.extend_from_slice(boundary.powers());
        let mut p = boundary.powers().to_vec();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];

        for step in 1..=steps {
            self.rhs(&p, &mut k1);
            for i in 0..n {
                tmp[i] = p[i] + 0.5 * signed_h * k1[i];
            }
            self.rhs(&tmp, &mut k2);
            for i in 0..n {
                tmp[i] = p[i] + 0.5 * signed_h * k2[i];
            }
            self.rhs(&tmp, &mut k3);
            for i in 0..n {
                tmp[i] = p[i] + signed_h * k3[i];
            }
            self.rhs(&tmp, &mut k4);
            for i in 0..n {
                p[i] += signed_h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if let Some(channel) = p.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                let z_m = match direction {
                    Direction::Forward => step as f64 * h,
                    Direction::Backward => length_m - step as f64 * h,
                };
                return Err(Error::SolverDivergence { z_m, channel });
            }
            out.extend_from_slice(&p);
        }

        if direction == Direction::Backward {
            // rows were produced from z = L downwards
            let mut rows: Vec<&[f64]> = out.chunks(n).collect();
            rows.reverse();
            out = rows.concat();
        }
        let z = (0..=steps).map(|k| k as f64 * h).collect();
        PowerEvolutionProfile::new(z, n, out)
    }
}

/// Solves the span for a launch profile (forward) or for a received profile
/// (backward).
pub fn solve_pep(
    boundary: &LaunchProfile,
    span: &SpanSpec,
    grid: &ChannelGrid,
    direction: Direction,
    step_m: f64,
) -> Result<PowerEvolutionProfile> {
    span.validate()?;
    PepSolver::new(&span.fiber, grid)?.solve(boundary, span.length_m, direction, step_m)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::physics::{build_channel_grid, BandName, BandPlan, Channel, RamanProfile};
    use crate::units::{lin_to_db, THZ};

    fn single_channel_grid() -> ChannelGrid {
        ChannelGrid::from_channels(
            vec![Channel { index: 0, center_hz: 193.4 * THZ, band: BandName::C, bandwidth_hz: 75e9 }],
            75e9,
        )
        .unwrap()
    }

    #[test]
    fn single_channel_pure_attenuation() {
        let fiber = FiberSpec::flat(0.2, 80e-12, RamanProfile::zero(30.0 * THZ), 180.0 * THZ, 210.0 * THZ).unwrap();
        let span = SpanSpec::new(70.0, Arc::new(fiber));
        let grid = single_channel_grid();
        let launch = LaunchProfile::flat_dbm(1, 0.0);
        let pep = solve_pep(&launch, &span, &grid, Direction::Forward, DEFAULT_STEP_M).unwrap();
        let loss = lin_to_db(launch.powers()[0] / pep.received().powers()[0]);
        assert!((loss - 14.0).abs() < 1e-9, "{loss}");
        assert_eq!(pep.n_samples(), 1401);
    }

    #[test]
    fn zero_rhs_keeps_profile_constant() {
        let grid = build_channel_grid(&BandPlan::c_only()).unwrap();
        let solver = PepSolver::linear(vec![0.0; grid.len()]);
        let launch = LaunchProfile::new((0..grid.len()).map(|i| 1e-3 * (1.0 + i as f64 / 10.0)).collect()).unwrap();
        let pep = solver.solve(&launch, 50e3, Direction::Forward, 100.0).unwrap();
        assert_eq!(pep.received(), launch);
        assert_eq!(received_profile(&pep), launch);
    }

    #[test]
    fn backward_profile_is_ascending_and_ends_at_boundary() {
        let fiber = Arc::new(FiberSpec::ssmf_default());
        let grid = build_channel_grid(&BandPlan::c_only()).unwrap();
        let span = SpanSpec::new(40.0, fiber);
        let rx = LaunchProfile::flat_dbm(grid.len(), -15.0);
        let pep = solve_pep(&rx, &span, &grid, Direction::Backward, 100.0).unwrap();
        assert_eq!(pep.received(), rx);
        assert!(pep.z().windows(2).all(|w| w[1] > w[0]));
        assert!(pep.launch().powers().iter().all(|&p| p > rx.powers()[0]));
    }

    #[test]
    fn rejects_bad_step_and_length_mismatch() {
        let solver = PepSolver::linear(vec![1e-5; 3]);
        let launch = LaunchProfile::flat_dbm(3, 0.0);
        assert!(solver.solve(&launch, 1e3, Direction::Forward, 0.0).is_err());
        assert!(solver.solve(&LaunchProfile::flat_dbm(2, 0.0), 1e3, Direction::Forward, 1.0).is_err());
    }

    #[test]
    fn divergence_is_reported() {
        // absurd gain with a coarse step blows up
        let fiber = FiberSpec::flat(
            0.2,
            80e-12,
            RamanProfile::triangular(200.0 * THZ, 1.0, 10.0 * THZ, 30.0 * THZ, false).unwrap(),
            180.0 * THZ,
            210.0 * THZ,
        )
        .unwrap();
        let grid = build_channel_grid(&BandPlan::c_only()).unwrap();
        let span = SpanSpec::new(50.0, Arc::new(fiber));
        let launch = LaunchProfile::flat_dbm(grid.len(), 10.0);
        let err = solve_pep(&launch, &span, &grid, Direction::Forward, 5000.0).unwrap_err();
        assert!(matches!(err, Error::SolverDivergence { .. }), "{err}");
    }

    #[test]
    fn negative_launch_rejected() {
        assert!(LaunchProfile::new(vec![1e-3, -1e-3]).is_err());
        assert!(LaunchProfile::new(vec![f64::NAN]).is_err());
    }
}
