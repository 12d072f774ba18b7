use num_complex::Complex64;

use crate::geometry::{AxisKind, FourVector, Grid};
use crate::numerics::{gauss_legendre, locate};
use crate::{Error, Result};

/// Electromagnetic four-potential `A^l = (phi, A)` sampled on a `(t, x)` or
/// `(x)` grid. Only the `x` component of the vector potential is carried in
/// the reduced 1+1 setting.
#[derive(Debug, Clone, PartialEq)]
pub struct EMPotential {
    pub grid: Grid,
    pub phi: Vec<f64>,
    pub ax: Vec<f64>,
}

impl EMPotential {
    pub fn zero(grid: &Grid) -> Self {
        EMPotential { grid: grid.clone(), phi: vec![0.0; grid.len()], ax: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: &Grid, phi: impl Fn(f64, f64) -> f64, ax: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut p = Vec::with_capacity(grid.len());
        let mut a = Vec::with_capacity(grid.len());
        for k in 0..grid.len() {
            let pos = grid.position(k);
            p.push(phi(pos[0], pos[1]));
            a.push(ax(pos[0], pos[1]));
        }
        EMPotential::new(grid.clone(), p, a)
    }

    pub fn new(grid: Grid, phi: Vec<f64>, ax: Vec<f64>) -> Result<Self> {
        if phi.len() != grid.len() || ax.len() != grid.len() {
            return Err(Error::Domain("potential sample count does not match grid".into()));
        }
        if phi.iter().chain(&ax).any(|v| !v.is_finite()) {
            return Err(Error::Domain("electromagnetic potential must be finite".into()));
        }
        Ok(EMPotential { grid, phi, ax })
    }

    pub fn is_zero(&self) -> bool {
        self.phi.iter().chain(&self.ax).all(|v| *v == 0.0)
    }

    pub fn is_static(&self) -> bool {
        match self.grid.time_axis() {
            None => true,
            Some(ta) => {
                let nt = self.grid.axis(ta).count;
                let nx = self.grid.len() / nt;
                (1..nt).all(|i| {
                    (0..nx).all(|j| self.phi[i * nx + j] == self.phi[j] && self.ax[i * nx + j] == self.ax[j])
                })
            }
        }
    }

    /// `(phi, A_x)` at `(t, x)` by (bi)linear interpolation.
    pub fn at(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        let sa = self
            .grid
            .space_axis()
            .ok_or_else(|| Error::Domain("potential grid has no spatial axis".into()))?;
        let xa = self.grid.axis(sa);
        let (ix, fx) = locate(xa.origin, xa.spacing, xa.count, x)
            .ok_or_else(|| Error::Domain(format!("x = {x} outside potential grid")))?;
        let (it, ft, nt) = match self.grid.time_axis() {
            Some(ta) => {
                let a = self.grid.axis(ta);
                let (i, f) = locate(a.origin, a.spacing, a.count, t)
                    .ok_or_else(|| Error::Domain(format!("t = {t} outside potential grid")))?;
                (i, f, a.count)
            }
            None => (0, 0.0, 1),
        };
        let nx = xa.count;
        let sample = |v: &[f64]| {
            let row = |i: usize| v[i * nx + ix] * (1.0 - fx) + v[i * nx + ix + 1] * fx;
            if nt == 1 {
                row(0)
            } else {
                row(it) * (1.0 - ft) + row(it + 1) * ft
            }
        };
        Ok((sample(&self.phi), sample(&self.ax)))
    }
}

/// `int_0^X A^l du_l` along the straight segment from the coordinate origin,
/// with `A^l du_l = phi dt - A_x dx` under the (+,-,-,-) signature.
pub fn line_integral(a: &EMPotential, end: &FourVector, nodes: usize) -> Result<f64> {
    let panels = (nodes / 8).max(1);
    let per = nodes.div_ceil(panels).max(1);
    let (z, w) = gauss_legendre(per);
    let has_t = a.grid.axis_of_kind(AxisKind::T).is_some();
    let mut acc = 0.0;
    for p in 0..panels {
        let (lo, hi) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
        for (zi, wi) in z.iter().zip(&w) {
            let s = lo + 0.5 * (hi - lo) * (zi + 1.0);
            let t = if has_t { s * end[0] } else { 0.0 };
            let (phi, ax) = a.at(t, s * end[1])?;
            acc += 0.5 * (hi - lo) * wi * (phi * end[0] - ax * end[1]);
        }
    }
    Ok(acc)
}

/// Gauge factor `exp[i e (int_0^{x+dx/2} + int_0^{x-dx/2}) A^l du_l]`
/// (`hbar = c = 1`), with the two line integrals added as written in the
/// transform's definition.
pub fn gauge_factor(a: &EMPotential, x: &FourVector, dx: &FourVector, charge: f64, nodes: usize) -> Result<Complex64> {
    let plus = *x + *dx * 0.5;
    let minus = *x - *dx * 0.5;
    let phase = charge * (line_integral(a, &plus, nodes)? + line_integral(a, &minus, nodes)?);
    Ok(Complex64::from_polar(1.0, phase))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Axis;

    fn tx_grid() -> Grid {
        Grid::spacetime(Axis::span(AxisKind::T, -2.0, 2.0, 21), Axis::span(AxisKind::X, -3.0, 3.0, 31)).unwrap()
    }

    #[test]
    fn zero_potential_gives_unit_factor() {
        let a = EMPotential::zero(&tx_grid());
        let f = gauge_factor(&a, &FourVector::tx(0.3, 0.2), &FourVector::tx(0.1, 0.4), 1.0, 32).unwrap();
        assert_eq!(f, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn linear_potential_line_integral_matches_closed_form() {
        // phi = c0 + c1 x, A_x = a0 t: int_0^1 [(c0 + c1 s X) T - a0 s T X] ds
        let (c0, c1, a0) = (0.4, -0.7, 0.3);
        let a = EMPotential::from_fn(&tx_grid(), |_, x| c0 + c1 * x, |t, _| a0 * t).unwrap();
        let end = FourVector::tx(1.2, -0.8);
        let exact = c0 * end[0] + 0.5 * c1 * end[1] * end[0] - 0.5 * a0 * end[0] * end[1];
        assert!((line_integral(&a, &end, 32).unwrap() - exact).abs() < 1e-13);
    }

    #[test]
    fn gauge_factor_has_unit_modulus() {
        let a = EMPotential::from_fn(&tx_grid(), |t, x| (x * t).sin(), |t, x| (x - t).cos()).unwrap();
        for i in 0..20 {
            let x = FourVector::tx(0.1 * i as f64 - 1.0, 0.05 * i as f64);
            let dx = FourVector::tx(0.02, -0.03 * i as f64);
            let f = gauge_factor(&a, &x, &dx, 2.5, 32).unwrap();
            assert!((f.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn path_outside_grid_is_an_error() {
        let a = EMPotential::zero(&tx_grid());
        assert!(line_integral(&a, &FourVector::tx(0.0, 10.0), 32).is_err());
    }
}
