//! Relativistic density-function quantum mechanics at desk scale.
//!
//! The crate is organised around six subsystems:
//!
//! * [`geometry`]: grids, four-vectors, diagonal metrics, Christoffel symbols
//!   and the (covariant) d'Alembertian.
//! * [`phase_space`]: joint distributions `F(x, p)`, the Liouville residual and
//!   the infinitesimal Wigner-Moyal transform with optional gauge factor.
//! * [`field`]: the second-order amplitude equation in flat 1+1 spacetime
//!   (leapfrog evolution, stationary states, density-equation residuals).
//! * [`madelung`]: `Psi = R exp(iS)` analysis, statistical potential, currents,
//!   probability density and trajectories.
//! * [`gravity`]: quantum stress tensor, weak-field metric and the
//!   self-consistent fixed-point loop.
//! * [`harness`]: configuration, reports, columnar/SVG export and the
//!   experiment drivers behind the `relquant` binary.
//!
//! Units are natural (`hbar = c = 1`); the mass, charge and Newton constant
//! are run parameters.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod error;
pub mod field;
pub mod geometry;
pub mod gravity;
pub mod harness;
pub mod io;
pub mod madelung;
pub mod numerics;
pub mod phase_space;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Physical parameters of a run. `hbar` and `c` are fixed to one.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    pub mass: f64,
    #[serde(default)]
    pub charge: f64,
    #[serde(default)]
    pub newton_g: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Physics { mass: 1.0, charge: 0.0, newton_g: 0.0 }
    }
}

impl Physics {
    pub fn with_mass(mass: f64) -> Self {
        Physics { mass, ..Default::default() }
    }
}
