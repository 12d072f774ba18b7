use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eigen::symmetric_lowest;
use crate::geometry::{AxisKind, Field, FluxOperator, MetricField};
use crate::madelung::{decompose, MadelungPair, MaskedField, NODE_FRACTION};
use crate::{Error, Result};

/// Stationary state `Psi = R(r) exp(-i E t)` in a static metric.
#[derive(Debug, Clone)]
pub struct CovariantState {
    pub energy: f64,
    pub pair: MadelungPair,
    /// Largest pointwise Hamilton-Jacobi residual away from nodes.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct CovariantSpectrum {
    pub states: Vec<CovariantState>,
    /// Why `states` is shorter than requested, if it is.
    pub diagnostic: Option<String>,
}

/// Radial `Box` with a Dirichlet wall half a cell beyond the last node
/// (`R_N = -R_{N-1}`); interior rows coincide with
/// [`crate::geometry::dalembertian`].
struct RadialBox {
    op: FluxOperator,
}

impl RadialBox {
    fn new(g: &MetricField) -> Result<Self> {
        let grid = &g.grid;
        if grid.ndim() != 1 || grid.axis(0).kind != AxisKind::R || !grid.axis(0).is_cell_centred_radial() {
            return Err(Error::Config("covariant stationary solve needs a static cell-centred radial grid".into()));
        }
        Ok(RadialBox { op: FluxOperator::along(g, 0, 0) })
    }

    /// `volume_i * (Box f)_i` as a symmetric matrix.
    fn weighted_matrix(&self) -> DMatrix<f64> {
        let n = self.op.volume.len();
        let h2 = self.op.spacing * self.op.spacing;
        let f = &self.op.faces;
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                let ghost = if i + 1 == n { 2.0 * f[n] } else { f[i + 1] };
                -(ghost + f[i]) / h2
            } else if j == i + 1 {
                f[i + 1] / h2
            } else if i == j + 1 {
                f[i] / h2
            } else {
                0.0
            }
        })
    }

    fn apply(&self, r: &[f64]) -> Vec<f64> {
        let n = r.len();
        let h2 = self.op.spacing * self.op.spacing;
        let f = &self.op.faces;
        (0..n)
            .map(|i| {
                let right = if i + 1 < n { f[i + 1] * (r[i + 1] - r[i]) } else { -2.0 * f[n] * r[i] };
                let left = if i > 0 { f[i] * (r[i] - r[i - 1]) } else { 0.0 };
                (right - left) / (h2 * self.op.volume[i])
            })
            .collect()
    }
}

/// `-Box R / (2 m R) + V - m/2 + g^00 E^2 / 2m` for `S = -E t`, with the
/// walled radial `Box`. Nodes are masked.
pub fn static_hamilton_jacobi_residual(mp: &MadelungPair, g: &MetricField, v: &[f64], mass: f64, energy: f64) -> Result<MaskedField> {
    if mp.grid() != &g.grid || v.len() != g.grid.len() {
        return Err(Error::Domain("pair, metric and potential must share a grid".into()));
    }
    let bx = RadialBox::new(g)?;
    // Signed amplitude: the phase is 0 or pi for a real profile.
    let signed: Vec<f64> = mp.r.values.iter().zip(&mp.s.values).map(|(r, s)| r * s.cos()).collect();
    let br = bx.apply(&signed);
    let valid: Vec<bool> = mp.node.iter().map(|n| !n).collect();
    let values = (0..signed.len())
        .map(|k| {
            if !valid[k] {
                return Ok(0.0);
            }
            let g00 = g.at(k)?[0];
            Ok(-br[k] / (2.0 * mass * signed[k]) + v[k] - 0.5 * mass + energy * energy / (2.0 * mass * g00))
        })
        .collect::<Result<_>>()?;
    Ok(MaskedField { field: Field::new(g.grid.clone(), values)?, valid })
}

/// Lowest `levels` positive-energy states of
/// `E^2 g^00 sqrt|g| R = [sqrt|g| Box + sqrt|g| (m^2 - 2 m V)] R`
/// in the spherical box of the grid, ascending. `R` is normalised so that
/// `4 pi int (E/m) g^00 R^2 sqrt|g| r^2 dr = 1`, the conserved charge of
/// the static state, and oriented with a positive maximum.
pub fn covariant_stationary_solve(g: &MetricField, v: &[f64], mass: f64, levels: usize) -> Result<CovariantSpectrum> {
    if !(mass > 0.0) {
        return Err(Error::Config("mass must be positive".into()));
    }
    if v.len() != g.grid.len() {
        return Err(Error::Domain("potential sample count does not match grid".into()));
    }
    let bx = RadialBox::new(g)?;
    let n = v.len();
    let vol = &bx.op.volume;
    let mut a = bx.weighted_matrix();
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        a[(i, i)] += vol[i] * (mass * mass - 2.0 * mass * v[i]);
        b.push(vol[i] / g.at(i)?[0]);
    }
    let pairs = symmetric_lowest(&a, Some(&b), levels)?;
    let h = bx.op.spacing;
    let mut states = Vec::new();
    let mut diagnostic = None;
    for p in pairs {
        if !(p.value > 0.0) {
            diagnostic = Some(format!("E^2 = {:.6e} is not positive: no stationary state", p.value));
            break;
        }
        let e = p.value.sqrt();
        let charge: f64 = (0..n).map(|i| 4.0 * std::f64::consts::PI * e / mass * b[i] * p.vector[i].powi(2) * h).sum();
        let peak = p.vector.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        let scale = peak.signum() / charge.sqrt();
        let profile = Field::new(g.grid.clone(), p.vector.iter().map(|x| Complex64::new(x * scale, 0.0)).collect())?;
        let eps = NODE_FRACTION * p.vector.amax() * scale.abs();
        let pair = decompose(&profile, eps)?;
        let residual = static_hamilton_jacobi_residual(&pair, g, v, mass, e)?.max_abs_where(|_| true);
        states.push(CovariantState { energy: e, pair, residual });
    }
    if states.is_empty() && diagnostic.is_none() {
        diagnostic = Some("eigen solver returned no pairs".into());
    }
    Ok(CovariantSpectrum { states, diagnostic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Axis, Grid};
    use crate::madelung::quantum_potential;
    use std::f64::consts::PI;

    fn radial(n: usize) -> Grid {
        Grid::line(Axis::radial(10.0, n)).unwrap()
    }

    #[test]
    fn flat_box_ground_state() {
        // Spherical box of radius a: R = sin(pi r / a) / r, E^2 = m^2 + (pi/a)^2.
        let m = 1.0;
        let mut errs = vec![];
        for n in [100, 200, 400] {
            let grid = radial(n);
            let sp = covariant_stationary_solve(&MetricField::flat(&grid), &vec![0.0; n], m, 2).unwrap();
            let s = &sp.states[0];
            assert!(s.residual < 1e-8, "{}", s.residual);
            assert!(s.pair.node.iter().all(|x| !x));
            errs.push((s.energy - (m * m + (PI / 10.0).powi(2)).sqrt()).abs());
            let excited = (m * m + (2.0 * PI / 10.0).powi(2)).sqrt();
            assert!((sp.states[1].energy - excited).abs() < 1e-2);
        }
        assert!(errs[2] < 1e-5 && errs[0] / errs[2] > 12.0, "{errs:?}");
    }

    #[test]
    fn uniform_potential_redshifts_the_rest_energy() {
        let (m, phi0, n) = (20.0, -1e-3, 120);
        let grid = radial(n);
        let flat = covariant_stationary_solve(&MetricField::flat(&grid), &vec![0.0; n], m, 1).unwrap().states[0].energy;
        let g = MetricField::weak_field(&grid, &vec![phi0; n]).unwrap();
        let e = covariant_stationary_solve(&g, &vec![0.0; n], m, 1).unwrap().states[0].energy;
        // Constant metric: the radial operator only picks up 1/(1 - 2 phi0).
        let k2 = flat * flat - m * m;
        let exact = ((1.0 + 2.0 * phi0) * (m * m + k2 / (1.0 - 2.0 * phi0))).sqrt();
        assert!((e - exact).abs() < 1e-12);
        assert!(((e - flat) - m * phi0).abs() < 0.1 * m * phi0.abs());
    }

    #[test]
    fn walled_box_agrees_with_quantum_potential_inside() {
        let grid = radial(80);
        let g = MetricField::flat(&grid);
        let m = 1.3;
        let psi = Field::from_fn(&grid, |q| Complex64::new((-q[1] * q[1] / 8.0).exp(), 0.0));
        let mp = decompose(&psi, 1e-14).unwrap();
        let hj = static_hamilton_jacobi_residual(&mp, &g, &vec![0.0; 80], m, m).unwrap();
        let vq = quantum_potential(&mp, &g, m).unwrap();
        for k in 0..79 {
            assert!((hj.field.values[k] - vq.field.values[k]).abs() < 1e-12 * (1.0 + vq.field.values[k].abs()));
        }
    }

    #[test]
    fn no_positive_state_is_reported() {
        let n = 40;
        let grid = radial(n);
        let sp = covariant_stationary_solve(&MetricField::flat(&grid), &vec![5.0; n], 1.0, 1).unwrap();
        assert!(sp.states.is_empty());
        assert!(sp.diagnostic.is_some());
    }
}
