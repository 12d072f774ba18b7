use nalgebra::DMatrix;
use num_complex::Complex64;

use super::potential::PotentialConfig;
use super::{ComplexField, EnergyBranch};
use crate::eigen::symmetric_window;
use crate::geometry::{Axis, Field, Grid};
use crate::{Error, Physics, Result};

/// Solution `Psi = psi(x) exp(-i E t)` of the stationary amplitude equation
/// `E^2 psi = -psi'' + m^2 psi - 2 m W psi`,
/// discretised with the same fourth-order Laplacian as [`super::evolve`].
#[derive(Debug, Clone)]
pub struct StationaryState {
    pub energy: f64,
    pub branch: EnergyBranch,
    /// Spatial profile, normalised so that `int |E|/m |psi|^2 dx = 1`.
    pub profile: ComplexField,
    /// `|H psi - E^2 psi|_inf / |psi|_inf`.
    pub residual: f64,
}

impl StationaryState {
    /// `psi(x) exp(-i E t)` on a `(t, x)` grid sharing this state's `x` axis.
    pub fn to_spacetime(&self, t: Axis) -> Result<ComplexField> {
        let x = *self.profile.grid.axis(0);
        let grid = Grid::spacetime(t, x)?;
        let nx = x.count;
        let values = (0..grid.len())
            .map(|k| self.profile.values[k % nx] * Complex64::from_polar(1.0, -self.energy * t.coord(k / nx)))
            .collect();
        Field::new(grid, values)
    }
}

/// Energy window for [`stationary_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyWindow {
    pub min: f64,
    pub max: f64,
}

/// All stationary states with `window.min <= E <= window.max`, ascending in
/// `E`. Periodic axes give a periodic box, other axes a Dirichlet box whose
/// end nodes carry `psi = 0`. Only static potentials without charge
/// coupling are supported.
pub fn stationary_solve(x: Axis, potential: &PotentialConfig, physics: &Physics, window: EnergyWindow) -> Result<Vec<StationaryState>> {
    let m = physics.mass;
    if !(m > 0.0) {
        return Err(Error::Config("mass must be positive".into()));
    }
    if !potential.is_static() {
        return Err(Error::Config("stationary states need a time-independent potential".into()));
    }
    if physics.charge != 0.0 && potential.has_em() {
        return Err(Error::Config("stationary solve does not support charge coupling to A".into()));
    }
    if !(window.min <= window.max) {
        return Err(Error::Config("energy window is empty".into()));
    }
    Grid::line(x)?;
    let (h, n) = (x.spacing, x.count);
    let xs = x.coords();
    let w: Vec<f64> = xs.iter().map(|xi| potential.effective_at(0.0, *xi)).collect::<Result<_>>()?;
    let (lo_idx, dim) = if x.periodic { (0, n) } else { (1, n - 2) };
    let inv_h2 = 1.0 / (h * h);
    let mut a = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let j = i + lo_idx;
        a[(i, i)] += m * m - 2.0 * m * w[j];
        for (k, c) in super::laplacian_stencil(j, n, x.periodic) {
            if x.periodic || (k > 0 && k + 1 < n) {
                a[(i, k - lo_idx)] -= c * inv_h2;
            }
        }
    }
    // E^2 range covered by the window.
    let sq = |e: f64| e * e;
    let (lam_lo, lam_hi) = if window.min <= 0.0 && window.max >= 0.0 {
        (0.0, sq(window.min).max(sq(window.max)))
    } else {
        (sq(window.min).min(sq(window.max)), sq(window.min).max(sq(window.max)))
    };
    let slack = 1e-12 * lam_hi.max(1.0);
    let pairs = symmetric_window(&a, None, lam_lo - slack, lam_hi + slack)?;
    let grid = Grid::line(x)?;
    let mut states = Vec::new();
    for p in pairs {
        if p.value < -slack {
            continue;
        }
        let e_abs = p.value.max(0.0).sqrt();
        let mut full = vec![0.0; n];
        for i in 0..dim {
            full[i + lo_idx] = p.vector[i];
        }
        let profile = Field::new(grid.clone(), full.iter().map(|v| Complex64::new(*v, 0.0)).collect())?;
        let norm2 = profile.map(|z| z.norm_sqr()).integrate();
        let scale = (m / (e_abs * norm2)).sqrt();
        let profile = profile.map(|z| z * scale);
        for (e, branch) in [(e_abs, EnergyBranch::Positive), (-e_abs, EnergyBranch::Negative)] {
            let tol = 1e-12 * e_abs.max(1.0);
            let inside = e >= window.min - tol && e <= window.max + tol;
            if inside && !(e == 0.0 && branch == EnergyBranch::Negative) {
                states.push(StationaryState { energy: e, branch, profile: profile.clone(), residual: p.residual });
            }
        }
    }
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AxisKind;
    use std::f64::consts::PI;

    #[test]
    fn periodic_box_matches_discrete_dispersion() {
        let (len, n, m) = (10.0, 64, 1.0);
        let x = Axis::periodic(AxisKind::X, 0.0, len, n);
        let states = stationary_solve(x, &PotentialConfig::free(), &Physics::with_mass(m), EnergyWindow { min: 0.0, max: 2.0 }).unwrap();
        assert!((states[0].energy - m).abs() < 1e-12);
        for s in &states {
            assert!(s.residual <= 1e-8);
        }
        let h = len / n as f64;
        let kh = 2.0 * PI * h / len;
        let k1sq = (15.0 - 16.0 * kh.cos() + (2.0 * kh).cos()) / (6.0 * h * h);
        let e1 = (m * m + k1sq).sqrt();
        assert!((states[1].energy - e1).abs() < 1e-10);
        assert!((states[2].energy - e1).abs() < 1e-10);
        let p = states[0].profile.map(|z| z.norm_sqr()).integrate() * states[0].energy / m;
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_box_has_nonrelativistic_limit() {
        let (len, m) = (10.0, 20.0);
        let x = Axis::span(AxisKind::X, 0.0, len, 801);
        let states = stationary_solve(x, &PotentialConfig::free(), &Physics::with_mass(m), EnergyWindow { min: m, max: m + 0.5 }).unwrap();
        for (k, s) in states.iter().take(3).enumerate() {
            let nr = PI * PI * ((k + 1) * (k + 1)) as f64 / (2.0 * m * len * len);
            let rel = ((s.energy - m) - nr).abs() / nr;
            assert!(rel < 2e-3, "level {k}: {rel}");
        }
    }

    #[test]
    fn negative_branch_and_spacetime_lift() {
        let x = Axis::periodic(AxisKind::X, 0.0, 5.0, 32);
        let st = stationary_solve(x, &PotentialConfig::free(), &Physics::with_mass(1.0), EnergyWindow { min: -1.0, max: 1.0 }).unwrap();
        assert_eq!(st.len(), 2);
        assert_eq!(st[0].branch, EnergyBranch::Negative);
        let f = st[1].to_spacetime(Axis::span(AxisKind::T, 0.0, 1.0, 9)).unwrap();
        let last = f.values[8 * 32];
        assert!((last - st[1].profile.values[0] * Complex64::from_polar(1.0, -1.0)).norm() < 1e-14);
    }
}
