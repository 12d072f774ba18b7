use std::f64::consts::PI;

use super::stress::StressTensor;
use super::GravityConfig;
use crate::geometry::{AxisKind, MetricField};
use crate::{Error, Result};

/// Static weak-field metric sourced by a stress tensor.
#[derive(Debug, Clone)]
pub struct WeakField {
    /// Newtonian potential `Phi` at the cell centres.
    pub phi: Vec<f64>,
    /// `g00 = 1 + 2 Phi`, `g_rr = -(1 - 2 Phi)`, angular parts flat.
    pub metric: MetricField,
    /// Active mass `4 pi int rho_eff r^2 dr` inside the grid.
    pub mass: f64,
}

/// Solves `laplacian Phi = 4 pi G rho_eff` on a cell-centred radial grid by
/// direct quadrature of the spherical Green's function,
/// `Phi(r) = -G [M(r)/r + 4 pi int_r^inf rho r' dr']`, treating `rho_eff`
/// as constant across each cell. Outside the grid the source is taken to
/// vanish, so `Phi` joins `-G M / r` at the boundary.
pub fn solve_metric_weak_field(t: &StressTensor, cfg: &GravityConfig) -> Result<WeakField> {
    let grid = &t.grid;
    if grid.ndim() != 1 || grid.axis(0).kind != AxisKind::R {
        return Err(Error::Config("weak-field solve needs a static radial grid".into()));
    }
    let axis = *grid.axis(0);
    if !axis.is_cell_centred_radial() {
        return Err(Error::Config("weak-field solve needs a cell-centred radial axis".into()));
    }
    if !(cfg.newton_g >= 0.0) {
        return Err(Error::Config("Newton constant must be >= 0".into()));
    }
    let scale = t.components.iter().map(|c| c[0][0].abs()).fold(0.0, f64::max);
    for c in &t.components {
        let flux = (1..4).map(|i| c[0][i].abs().max(c[i][0].abs())).fold(0.0, f64::max);
        if flux > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Config("stress tensor carries momentum flux: not static".into()));
        }
    }
    let rho = t.active_density();
    let peak = rho.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tail = rho[rho.len() - 1].abs();
    if peak > 0.0 && tail > cfg.tail_fraction * peak {
        return Err(Error::Boundary(format!(
            "source does not decay at r = {:.6e}: edge density {tail:.3e} vs peak {peak:.3e}",
            axis.coord(axis.count - 1)
        )));
    }
    let h = axis.spacing;
    let n = axis.count;
    let lo = |i: usize| i as f64 * h;
    let mid = |i: usize| axis.coord(i);
    let hi = |i: usize| (i + 1) as f64 * h;
    // Shell masses and outer-integral pieces per cell.
    let shell: Vec<f64> = (0..n).map(|i| 4.0 * PI / 3.0 * rho[i] * (hi(i).powi(3) - lo(i).powi(3))).collect();
    let ring: Vec<f64> = (0..n).map(|i| 2.0 * PI * rho[i] * (hi(i).powi(2) - lo(i).powi(2))).collect();
    let mut inner = 0.0;
    let mut enclosed = Vec::with_capacity(n);
    for i in 0..n {
        enclosed.push(inner + 4.0 * PI / 3.0 * rho[i] * (mid(i).powi(3) - lo(i).powi(3)));
        inner += shell[i];
    }
    let mut outer = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        outer[i] = acc + 2.0 * PI * rho[i] * (hi(i).powi(2) - mid(i).powi(2));
        acc += ring[i];
    }
    let phi: Vec<f64> = (0..n).map(|i| -cfg.newton_g * (enclosed[i] / mid(i) + outer[i])).collect();
    if let Some(deep) = phi.iter().find(|p| !(p.abs() < 0.5)) {
        return Err(Error::Domain(format!("potential {deep:.3e} leaves the weak-field regime")));
    }
    let metric = if phi.iter().all(|p| *p == 0.0) { MetricField::flat(grid) } else { MetricField::weak_field(grid, &phi)? };
    Ok(WeakField { phi, metric, mass: inner })
}
