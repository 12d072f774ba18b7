use num_complex::Complex64;

use crate::field::{ComplexField, EnergyBranch, PotentialConfig};
use crate::geometry::{divergence, Field, FourVector, Grid, MetricField, ScalarField};
use crate::phase_space::DensityProvider;
use crate::{Error, Physics, Result};

/// `j^a` per grid point together with its divergence.
#[derive(Debug, Clone)]
pub struct FourCurrentField {
    pub j: Field<[f64; 4]>,
    /// `nabla_a j^a`, zero for exact solutions.
    pub divergence: ScalarField,
}

/// `j^a = (i/2m)[Psi* d^a Psi - Psi d^a Psi*] + (e/m) A^a |Psi|^2`; the gauge
/// term only appears with a charge and a nonzero potential.
pub fn four_current(psi: &ComplexField, g: &MetricField, physics: &Physics, potential: &PotentialConfig) -> Result<FourCurrentField> {
    if psi.grid != g.grid {
        return Err(Error::Domain("amplitude and metric live on different grids".into()));
    }
    let m = physics.mass;
    if !(m > 0.0) {
        return Err(Error::Config("mass must be positive".into()));
    }
    let mut j = vec![[0.0; 4]; psi.values.len()];
    for (axis, a) in psi.grid.axes().iter().enumerate() {
        let c = a.kind.component();
        let d = psi.partial(axis)?;
        for (k, dv) in d.values.iter().enumerate() {
            let ginv = 1.0 / g.components[k][c];
            j[k][c] = -(psi.values[k].conj() * dv).im * ginv / m;
        }
    }
    if physics.charge != 0.0 && potential.has_em() {
        for (k, jk) in j.iter_mut().enumerate() {
            let p = psi.grid.position(k);
            let (phi, ax) = potential.em_at(p[0], p[1])?;
            let w = physics.charge * psi.values[k].norm_sqr() / m;
            jk[0] += w * phi;
            jk[1] += w * ax;
        }
    }
    let j = Field::new(psi.grid.clone(), j)?;
    let divergence = divergence(&j, g)?;
    Ok(FourCurrentField { j, divergence })
}

/// Branch whose sign matches `int j^0`.
pub fn detect_branch(current: &FourCurrentField) -> EnergyBranch {
    let q: f64 = current.j.values.iter().map(|v| v[0]).sum();
    if q < 0.0 {
        EnergyBranch::Negative
    } else {
        EnergyBranch::Positive
    }
}

#[derive(Debug, Clone)]
pub struct ProbabilityDensity {
    /// `P = +-j^0` (dimensionless in natural units).
    pub p: ScalarField,
    /// `int P dx` on each time level (a single entry for static grids).
    pub integrals: Vec<f64>,
    /// Set when `P` takes the wrong sign beyond tolerance: carries the
    /// integrals of the positive and the negative parts.
    pub branch_mismatch: Option<(f64, f64)>,
}

/// `P = j^0 / (+-m c)` in natural units with the current already divided by
/// `m`, i.e. `P = +-j^0`.
pub fn probability_density(current: &FourCurrentField, branch: EnergyBranch, tolerance: f64) -> Result<ProbabilityDensity> {
    let sign = match branch {
        EnergyBranch::Positive => 1.0,
        EnergyBranch::Negative => -1.0,
    };
    let grid = current.j.grid.clone();
    let p = Field::new(grid.clone(), current.j.values.iter().map(|v| sign * v[0]).collect())?;
    let space = grid.space_axis().ok_or_else(|| Error::Domain("density needs a spatial axis".into()))?;
    let rows = grid.len() / grid.axis(space).count;
    let sa = *grid.axis(space);
    let line_grid = Grid::line(sa)?;
    let mut integrals = Vec::with_capacity(rows);
    let (mut pos, mut neg) = (0.0, 0.0);
    for start in grid.line_starts(space) {
        let line = Field::new(line_grid.clone(), p.line(space, start))?;
        integrals.push(line.integrate());
        pos += line.map(|v| v.max(0.0)).integrate();
        neg += line.map(|v| v.min(0.0)).integrate();
    }
    let scale = p.max_abs().max(f64::MIN_POSITIVE);
    let mismatch = p.values.iter().any(|v| *v < -tolerance * scale);
    Ok(ProbabilityDensity {
        p,
        integrals,
        branch_mismatch: mismatch.then_some((pos / rows as f64, neg / rows as f64)),
    })
}

/// `int (1/2i)[Psi d^a Psi* - Psi* d^a Psi] d^nx` over the grid, together
/// with `m int j^a d^nx` from the same derivatives.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeMoment {
    pub momentum: FourVector,
    pub current_integral: FourVector,
}

pub fn mean_four_momentum_amplitude(psi: &ComplexField, g: &MetricField, physics: &Physics) -> Result<AmplitudeMoment> {
    let grid = &psi.grid;
    let mut momentum = FourVector::ZERO;
    for (axis, a) in grid.axes().iter().enumerate() {
        let c = a.kind.component();
        let d = psi.partial(axis)?;
        let integrand: Vec<f64> = (0..grid.len())
            .map(|k| {
                let up = d.values[k] / g.components[k][c];
                let z = (psi.values[k] * up.conj() - psi.values[k].conj() * up) / Complex64::new(0.0, 2.0);
                z.re
            })
            .collect();
        momentum[c] = Field::new(grid.clone(), integrand)?.integrate();
    }
    let cur = four_current(psi, g, &Physics { charge: 0.0, ..*physics }, &PotentialConfig::free())?;
    let mut current_integral = FourVector::ZERO;
    for c in 0..2 {
        current_integral[c] = physics.mass * cur.j.map(|v| v[c]).integrate();
    }
    Ok(AmplitudeMoment { momentum, current_integral })
}

/// `rho(x + dx/2, x - dx/2) = Psi*(x + dx/2) Psi(x - dx/2)` from a sampled
/// amplitude (cubic interpolation), for the phase-space momentum extractor.
pub struct AmplitudeDensity<'a> {
    pub psi: &'a ComplexField,
    grid: Grid,
}

impl<'a> AmplitudeDensity<'a> {
    /// Quadrature over the amplitude's own grid, trimmed by `margin` nodes
    /// on non-periodic edges so shifted points stay inside.
    pub fn new(psi: &'a ComplexField, margin: usize) -> Result<Self> {
        let axes = psi
            .grid
            .axes()
            .iter()
            .map(|a| {
                if a.periodic {
                    *a
                } else {
                    crate::geometry::Axis::new(a.kind, a.coord(margin), a.spacing, a.count - 2 * margin)
                }
            })
            .collect();
        Ok(AmplitudeDensity { psi, grid: Grid::new(axes)? })
    }
}

impl DensityProvider for AmplitudeDensity<'_> {
    fn quadrature_grid(&self) -> &Grid {
        &self.grid
    }

    fn density(&self, x: &FourVector, dx: &FourVector) -> Result<Complex64> {
        let a = *x + *dx * 0.5;
        let b = *x - *dx * 0.5;
        Ok(self.psi.interpolate_cubic(&a.0)?.conj() * self.psi.interpolate_cubic(&b.0)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::plane_wave_field;
    use crate::geometry::{Axis, AxisKind};
    use crate::phase_space::mean_momentum_from_density;
    use std::f64::consts::PI;

    fn box_grid() -> Grid {
        Grid::spacetime(Axis::span(AxisKind::T, 0.0, 1.0, 21), Axis::periodic(AxisKind::X, 0.0, 10.0, 200)).unwrap()
    }

    #[test]
    fn plane_wave_current_and_density() {
        let g = box_grid();
        let flat = MetricField::flat(&g);
        let (p, m) = (2.0 * PI * 3.0 / 10.0, 1.2);
        let e = (m * m + p * p).sqrt();
        let phys = Physics::with_mass(m);
        let psi = plane_wave_field(&g, p, m, EnergyBranch::Positive);
        let cur = four_current(&psi, &flat, &phys, &PotentialConfig::free()).unwrap();
        // Second-order differences of exp(i k x) shrink k by sin(kh)/(kh).
        let (ht, hx) = (g.axis(0).spacing, g.axis(1).spacing);
        let (ed, pd) = ((e * ht).sin() / ht, (p * hx).sin() / hx);
        for (k, v) in cur.j.values.iter().enumerate() {
            if g.is_interior(k, 1) {
                assert!((v[0] - ed / m).abs() < 1e-12 && (v[1] - pd / m).abs() < 1e-12);
            }
        }
        let dens = probability_density(&cur, EnergyBranch::Positive, 1e-12).unwrap();
        assert!(dens.branch_mismatch.is_none());
        assert!((dens.integrals[5] - 10.0 * ed / m).abs() < 1e-9);
        let neg = plane_wave_field(&g, p, m, EnergyBranch::Negative);
        let cn = four_current(&neg, &flat, &phys, &PotentialConfig::free()).unwrap();
        assert_eq!(detect_branch(&cn), EnergyBranch::Negative);
        let dn = probability_density(&cn, EnergyBranch::Negative, 1e-12).unwrap();
        assert!((dn.p.values[45] - dens.p.values[45]).abs() < 1e-12);
        assert!(probability_density(&cn, EnergyBranch::Positive, 1e-12).unwrap().branch_mismatch.is_some());
    }

    #[test]
    fn current_is_antisymmetric_and_vanishes_for_real_fields() {
        let g = box_grid();
        let flat = MetricField::flat(&g);
        let phys = Physics::with_mass(1.0);
        let psi = Field::from_fn(&g, |q| Complex64::new((q[1] - 5.0).cos() + 0.3 * q[0], (0.4 * q[1] * q[0]).sin()));
        let a = four_current(&psi, &flat, &phys, &PotentialConfig::free()).unwrap();
        let b = four_current(&psi.map(|z| z.conj()), &flat, &phys, &PotentialConfig::free()).unwrap();
        for (u, v) in a.j.values.iter().zip(&b.j.values) {
            assert_eq!(u[0], -v[0]);
            assert_eq!(u[1], -v[1]);
        }
        let real = psi.map(|z| Complex64::new(z.re, 0.0));
        let r = four_current(&real, &flat, &phys, &PotentialConfig::free()).unwrap();
        assert!(r.j.values.iter().all(|v| v[0] == 0.0 && v[1] == 0.0));
    }

    #[test]
    fn moment_identity_and_density_route_agree() {
        let g = Grid::line(Axis::periodic(AxisKind::X, 0.0, 10.0, 256)).unwrap();
        let flat = MetricField::flat(&g);
        let phys = Physics::with_mass(1.0);
        let p = 2.0 * PI * 2.0 / 10.0;
        let psi = Field::from_fn(&g, |q| {
            let env = (-(q[1] - 5.0).powi(2) / 2.0).exp();
            Complex64::from_polar(env, p * q[1])
        });
        let mom = mean_four_momentum_amplitude(&psi, &flat, &phys).unwrap();
        assert!((mom.momentum[1] - mom.current_integral[1]).abs() < 1e-10);
        let via_density = mean_momentum_from_density(&AmplitudeDensity::new(&psi, 0).unwrap()).unwrap();
        assert!((via_density.momentum[1] - mom.momentum[1]).abs() < 1e-3 * mom.momentum[1].abs());
        // Standing wave: spatial momentum cancels.
        let standing = Field::from_fn(&g, |q| Complex64::new(2.0 * (p * q[1]).cos(), 0.0));
        let ms = mean_four_momentum_amplitude(&standing, &flat, &phys).unwrap();
        assert!(ms.momentum[1].abs() < 1e-12);
    }
}
