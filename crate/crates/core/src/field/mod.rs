//! Second-order amplitude equation in flat 1+1 spacetime.

mod evolve;
pub mod init;
mod potential;
mod residual;
mod stationary;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::Field;

pub use evolve::{evolve, EvolveOptions, Evolution};
pub use init::{gaussian_packet, plane_wave, plane_wave_field, square_well, InitialData};
pub use potential::{em_fields_from_potential, EMFields, PotentialConfig, Snapshot};
pub use residual::{amplitude_operator, density_equation_residual, DensityResidual, COLLAR};
pub use stationary::{stationary_solve, EnergyWindow, StationaryState};

pub type ComplexField = Field<Complex64>;

/// Sign of the energy (equivalently of `j^0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EnergyBranch {
    #[default]
    Positive,
    Negative,
}

/// Fourth-order second-difference weights for offsets `-2..=2`.
const LAP4: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];

/// Nodes and signs entering the fourth-order Laplacian at node `j`. Periodic
/// lines wrap; otherwise the end nodes are walls with `psi = 0` and odd
/// reflection beyond them, which keeps the operator symmetric.
pub(crate) fn laplacian_stencil(j: usize, n: usize, periodic: bool) -> impl Iterator<Item = (usize, f64)> {
    (0..5).map(move |o| {
        let k = j as isize + o as isize - 2;
        let last = n as isize - 1;
        let w = LAP4[o];
        if periodic {
            return (k.rem_euclid(n as isize) as usize, w);
        }
        if k < 0 {
            (-k as usize, -w)
        } else if k > last {
            ((2 * last - k) as usize, -w)
        } else {
            (k as usize, w)
        }
    })
}
