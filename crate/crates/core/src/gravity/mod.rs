//! Statistical gravity in a static, spherically symmetric weak field.
//!
//! The quantum stress tensor `T_(Q) = m R^2 u u` of a stationary state
//! sources a linearised metric `g00 = 1 + 2 Phi`, `g_rr = -(1 - 2 Phi)`; the
//! state is then re-solved in that metric and the loop repeated until the
//! metric stops changing. The converged metric describes ensemble
//! statistics of the geometry rather than a physical spacetime.
//!
//! The field equation is normalised so that the Newtonian limit
//! `laplacian Phi = 4 pi G rho` holds.

mod coupled;
mod covariant;
mod stress;
mod weak_field;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use coupled::{coupled_solve, CoupledSolution, IterationRecord};
pub use covariant::{covariant_stationary_solve, static_hamilton_jacobi_residual, CovariantSpectrum, CovariantState};
pub use stress::{matter_tensor, QuantumStressTensor, StressTensor};
pub use weak_field::{solve_metric_weak_field, WeakField};

use crate::geometry::{Axis, Grid};
use crate::{Error, Result};

/// Ordinary matter placed alongside the quantum source.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExternalMatter {
    #[default]
    None,
    UniformBall {
        radius: f64,
        mass: f64,
    },
    Gaussian {
        sigma: f64,
        mass: f64,
    },
}

impl ExternalMatter {
    /// Cell-averaged density on a cell-centred radial grid.
    pub fn density(&self, axis: &Axis) -> Vec<f64> {
        let h = axis.spacing;
        (0..axis.count)
            .map(|i| {
                let (lo, hi) = (i as f64 * h, (i + 1) as f64 * h);
                match *self {
                    ExternalMatter::None => 0.0,
                    ExternalMatter::UniformBall { radius, mass } => {
                        let rho = mass / (4.0 / 3.0 * PI * radius.powi(3));
                        let top = hi.min(radius);
                        if top <= lo {
                            0.0
                        } else {
                            rho * (top.powi(3) - lo.powi(3)) / (hi.powi(3) - lo.powi(3))
                        }
                    }
                    ExternalMatter::Gaussian { sigma, mass } => {
                        let r = axis.coord(i);
                        mass / ((2.0 * PI).powf(1.5) * sigma.powi(3)) * (-r * r / (2.0 * sigma * sigma)).exp()
                    }
                }
            })
            .collect()
    }
}

/// Parameters of the coupled problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GravityConfig {
    /// Taken from the run's physics section when read from a run file.
    #[serde(skip)]
    pub newton_g: f64,
    #[serde(skip)]
    pub mass: f64,
    /// Radius of the spherical box (Dirichlet wall).
    pub r_max: f64,
    pub cells: usize,
    pub matter: ExternalMatter,
    pub max_iterations: usize,
    /// Stop once the metric potential moves by less than this.
    pub tolerance: f64,
    /// Metric update `Phi <- Phi + omega (Phi_new - Phi)`.
    pub relaxation: f64,
    /// Largest admissible edge-to-peak ratio of the source density.
    pub tail_fraction: f64,
}

impl Default for GravityConfig {
    fn default() -> Self {
        GravityConfig {
            newton_g: 0.0,
            mass: 1.0,
            r_max: 10.0,
            cells: 200,
            matter: ExternalMatter::None,
            max_iterations: 50,
            tolerance: 1e-11,
            relaxation: 0.5,
            tail_fraction: 1e-3,
        }
    }
}

impl GravityConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.into()));
        if !(self.newton_g >= 0.0) {
            return bad("newton_g must be >= 0");
        }
        if !(self.mass > 0.0) {
            return bad("mass must be positive");
        }
        if !(self.r_max > 0.0) {
            return bad("r_max must be positive");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return bad("relaxation must lie in (0, 1]");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1");
        }
        if !(self.tail_fraction > 0.0) {
            return bad("tail_fraction must be positive");
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::line(Axis::radial(self.r_max, self.cells))
    }
}
