//! Power evolution along a span under inter-channel stimulated Raman
//! scattering, and the three-parameter effective-loss fit.

mod fit;
mod solver;

pub use fit::{fit_loss_model, FittedLossModel, SIGMA_MAX, SIGMA_MIN, SIGMA_TOL};
pub use solver::{
    received_profile, solve_pep, Direction, LaunchProfile, PepSolver, PowerEvolutionProfile, DEFAULT_STEP_M,
};
