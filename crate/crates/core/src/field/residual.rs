use num_complex::Complex64;

use super::potential::PotentialConfig;
use super::ComplexField;
use crate::geometry::{Field, FourVector};
use crate::numerics::Stencil;
use crate::{Error, Physics, Result};

/// Points closer than this to a non-periodic edge are not scored.
pub const COLLAR: usize = 2;

/// Density-equation residual on the grid of the amplitude.
#[derive(Debug, Clone)]
pub struct DensityResidual {
    pub field: ComplexField,
    /// Whether both `x +- dx/2` sit at least [`COLLAR`] nodes inside the grid.
    pub valid: Vec<bool>,
}

impl DensityResidual {
    pub fn max_abs(&self) -> f64 {
        self.field.values.iter().zip(&self.valid).filter(|(_, v)| **v).fold(0.0, |m, (z, _)| m.max(z.norm()))
    }
}

fn half_steps(d: f64, h: f64) -> Result<isize> {
    let s = 0.5 * d / h;
    let r = s.round();
    if (s - r).abs() > 1e-6 {
        return Err(Error::Domain(format!("separation/2 = {} is not a multiple of the spacing {h}", 0.5 * d)));
    }
    Ok(r as isize)
}

/// `(1/2m) D^2 Psi + (W - m/2) Psi` with fourth-order stencils, where
/// `D = i d + e A`.
pub fn amplitude_operator(psi: &ComplexField, potential: &PotentialConfig, physics: &Physics) -> Result<ComplexField> {
    let g = &psi.grid;
    let (ta, xa) = match (g.time_axis(), g.space_axis()) {
        (Some(t), Some(x)) if g.ndim() == 2 => (t, x),
        _ => return Err(Error::Domain("amplitude must live on a (t, x) grid".into())),
    };
    let (m, e) = (physics.mass, physics.charge);
    let psi_t = psi.partial_with(ta, Stencil::Fourth)?;
    let psi_x = psi.partial_with(xa, Stencil::Fourth)?;
    let psi_tt = psi.partial2_with(ta, Stencil::Fourth)?;
    let psi_xx = psi.partial2_with(xa, Stencil::Fourth)?;
    let (nt, nx) = (g.axis(ta).count, g.axis(xa).count);
    let xs = g.axis(xa).coords();
    let i = Complex64::new(0.0, 1.0);
    let mut out = vec![Complex64::default(); g.len()];
    for it in 0..nt {
        let s = potential.snapshot(g.axis(ta).coord(it), &xs)?;
        for ix in 0..nx {
            let k = if ta == 0 { g.flat(&[it, ix]) } else { g.flat(&[ix, it]) };
            let mut d2 = psi_xx.values[k] - psi_tt.values[k];
            if e != 0.0 {
                d2 += i * e * (psi.values[k] * (s.phi_t[ix] + s.ax_x[ix]))
                    + i * (2.0 * e) * (psi_t.values[k] * s.phi[ix] + psi_x.values[k] * s.ax[ix])
                    + psi.values[k] * (e * e * (s.phi[ix] * s.phi[ix] - s.ax[ix] * s.ax[ix]));
            }
            out[k] = d2 / (2.0 * m) + psi.values[k] * (s.w[ix] - 0.5 * m);
        }
    }
    Field::new(g.clone(), out)
}

/// Residual of the density-matrix equation for `rho(y, y') = Psi*(y') Psi(y)`
/// with `y = x + dx/2`, `y' = x - dx/2`:
///
/// `(1/2m) {[i d_y + e A(y)]^2 - [-i d_y' + e A(y')]^2} rho + [W(y) - W(y')] rho`.
///
/// Because `rho` factorises, the derivatives act on one factor each. `dx/2`
/// must be a whole number of grid steps in each direction.
pub fn density_equation_residual(psi: &ComplexField, potential: &PotentialConfig, physics: &Physics, dx: &FourVector) -> Result<DensityResidual> {
    if !(physics.mass > 0.0) {
        return Err(Error::Config("mass must be positive".into()));
    }
    let op = amplitude_operator(psi, potential, physics)?;
    let g = &psi.grid;
    let shifts: Vec<isize> = g.axes().iter().map(|a| half_steps(dx[a.kind.component()], a.spacing)).collect::<Result<_>>()?;
    for (a, s) in g.axes().iter().zip(&shifts) {
        if !a.periodic && 2 * s.unsigned_abs() >= a.count {
            return Err(Error::Domain("separation exceeds the grid".into()));
        }
    }
    let shift = |idx: &[usize], sign: isize| -> Option<usize> {
        let mut out = Vec::with_capacity(idx.len());
        for ((i, a), s) in idx.iter().zip(g.axes()).zip(&shifts) {
            let j = *i as isize + sign * s;
            let n = a.count as isize;
            if a.periodic {
                out.push(j.rem_euclid(n) as usize);
            } else if j >= COLLAR as isize && j + (COLLAR as isize) < n {
                out.push(j as usize);
            } else {
                return None;
            }
        }
        Some(g.flat(&out))
    };
    let mut values = vec![Complex64::default(); g.len()];
    let mut valid = vec![false; g.len()];
    for k in 0..g.len() {
        let idx = g.multi(k);
        if let (Some(y), Some(yp)) = (shift(&idx, 1), shift(&idx, -1)) {
            values[k] = psi.values[yp].conj() * op.values[y] - psi.values[y] * op.values[yp].conj();
            valid[k] = true;
        }
    }
    Ok(DensityResidual { field: Field::new(g.clone(), values)?, valid })
}
