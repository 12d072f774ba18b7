//! `Psi = R exp(iS)` analysis: statistical potential, continuity and
//! Hamilton-Jacobi residuals, four-current, probability density, the
//! small-separation expansion and guidance trajectories.
//!
//! Momenta follow `p^a = -d^a S = m j^a / R^2`, so a positive-energy plane
//! wave `exp(i(p x - E t))` carries `p^a = (E, p)`.

mod current;
mod expansion;
mod pair;
mod potential;
mod trajectory;

pub use current::{
    detect_branch, four_current, mean_four_momentum_amplitude, probability_density, AmplitudeDensity, AmplitudeMoment,
    FourCurrentField, ProbabilityDensity,
};
pub use expansion::{expansion_check, ExpansionCheck};
pub use pair::{decompose, node_threshold, recompose, MadelungPair, MaskedField, NODE_FRACTION};
pub use potential::{
    continuity_residual, effective_potential, hamilton_jacobi_residual, phase_gradient, phase_gradient_with, quantum_potential,
    sample_potential,
};
pub use trajectory::{integrate_trajectory, Guidance, Trajectory, TrajectoryOptions, TrajectoryState, TrajectoryStop};
