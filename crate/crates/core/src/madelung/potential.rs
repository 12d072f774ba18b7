use std::f64::consts::PI;

use super::pair::{MadelungPair, MaskedField};
use crate::field::PotentialConfig;
use crate::geometry::{dalembertian, divergence, Field, MetricField, ScalarField};
use crate::numerics::{d1, d1_fourth, Stencil};
use crate::{Error, Physics, Result};

/// Lower-index gradient `d_mu S`. On periodic axes the phase is extended
/// quasi-periodically (`S(x + L) = S(x) + winding`), so a plane wave with a
/// whole number of wavelengths has a constant gradient across the seam.
pub fn phase_gradient(mp: &MadelungPair) -> Result<Field<[f64; 4]>> {
    phase_gradient_with(mp, Stencil::Second)
}

pub fn phase_gradient_with(mp: &MadelungPair, stencil: Stencil) -> Result<Field<[f64; 4]>> {
    let g = mp.grid();
    let mut out = vec![[0.0; 4]; g.len()];
    for (axis, a) in g.axes().iter().enumerate() {
        let c = a.kind.component();
        let d = if a.periodic {
            mp.s.map_lines(axis, |l| {
                let n = l.len();
                let step = l[0] - l[n - 1];
                let winding = l[n - 1] - l[0] + step - 2.0 * PI * (step / (2.0 * PI)).round();
                let mut padded = Vec::with_capacity(n + 4);
                padded.extend([l[n - 2] - winding, l[n - 1] - winding]);
                padded.extend_from_slice(l);
                padded.extend([l[0] + winding, l[1] + winding]);
                (2..n + 2)
                    .map(|i| match stencil {
                        Stencil::Second => d1(&padded, i, a.spacing),
                        Stencil::Fourth => d1_fourth(&padded, i, a.spacing),
                    })
                    .collect()
            })
        } else {
            mp.s.partial_with(axis, stencil)?
        };
        for (k, v) in d.values.iter().enumerate() {
            out[k][c] = *v;
        }
    }
    Field::new(g.clone(), out)
}

fn check_grids(mp: &MadelungPair, g: &MetricField) -> Result<()> {
    if mp.grid() != &g.grid {
        return Err(Error::Domain("Madelung pair and metric live on different grids".into()));
    }
    Ok(())
}

/// `V_Q = -Box R / (2 m R)` with the (covariant) d'Alembertian of `g`.
/// Nodes are masked.
pub fn quantum_potential(mp: &MadelungPair, g: &MetricField, mass: f64) -> Result<MaskedField> {
    check_grids(mp, g)?;
    if !(mass > 0.0) {
        return Err(Error::Config("mass must be positive".into()));
    }
    let box_r = dalembertian(&mp.r, g)?;
    let valid: Vec<bool> = mp.node.iter().map(|n| !n).collect();
    let values = (0..valid.len())
        .map(|k| if valid[k] { -box_r.values[k] / (2.0 * mass * mp.r.values[k]) } else { 0.0 })
        .collect();
    Ok(MaskedField { field: Field::new(mp.grid().clone(), values)?, valid })
}

/// `W` at every grid point (`t`, `x` or `r` read from the point's position).
pub fn sample_potential(potential: &PotentialConfig, grid: &crate::geometry::Grid) -> Result<ScalarField> {
    let values = (0..grid.len())
        .map(|k| {
            let p = grid.position(k);
            potential.effective_at(p[0], p[1])
        })
        .collect::<Result<_>>()?;
    Field::new(grid.clone(), values)
}

/// `V_eff = W + V_Q`.
pub fn effective_potential(mp: &MadelungPair, potential: &PotentialConfig, g: &MetricField, mass: f64) -> Result<MaskedField> {
    let mut q = quantum_potential(mp, g, mass)?;
    let w = sample_potential(potential, mp.grid())?;
    for (v, (wk, ok)) in q.field.values.iter_mut().zip(w.values.iter().zip(&q.valid)) {
        if *ok {
            *v += wk;
        }
    }
    Ok(q)
}

/// Kinetic covector `d_mu S - e A_mu`.
fn kinetic(mp: &MadelungPair, g: &MetricField, potential: &PotentialConfig, charge: f64) -> Result<Field<[f64; 4]>> {
    let mut ds = phase_gradient(mp)?;
    if charge != 0.0 && potential.has_em() {
        for (k, v) in ds.values.iter_mut().enumerate() {
            let p = mp.grid().position(k);
            let (phi, ax) = potential.em_at(p[0], p[1])?;
            let gk = g.at(k)?;
            // A_mu = g_mu_mu A^mu
            v[0] -= charge * gk[0] * phi;
            v[1] -= charge * gk[1] * ax;
        }
    }
    Ok(ds)
}

/// `nabla_mu [R^2 (d^mu S - e A^mu)] / m`; vanishes for exact solutions.
pub fn continuity_residual(mp: &MadelungPair, g: &MetricField, physics: &Physics, potential: &PotentialConfig) -> Result<MaskedField> {
    check_grids(mp, g)?;
    let u = kinetic(mp, g, potential, physics.charge)?;
    let flux: Vec<[f64; 4]> = (0..u.values.len())
        .map(|k| {
            let gi = g.inverse_at(k)?;
            let r2 = mp.r.values[k] * mp.r.values[k] / physics.mass;
            Ok([r2 * gi[0] * u.values[k][0], r2 * gi[1] * u.values[k][1], 0.0, 0.0])
        })
        .collect::<Result<_>>()?;
    let div = divergence(&Field::new(mp.grid().clone(), flux)?, g)?;
    Ok(MaskedField::all_valid(div))
}

/// `V_Q + W - m/2 + (d_b S - e A_b)(d^b S - e A^b) / 2m`; nodes masked.
pub fn hamilton_jacobi_residual(mp: &MadelungPair, g: &MetricField, physics: &Physics, potential: &PotentialConfig) -> Result<MaskedField> {
    let m = physics.mass;
    let mut out = effective_potential(mp, potential, g, m)?;
    let u = kinetic(mp, g, potential, physics.charge)?;
    for k in 0..u.values.len() {
        if out.valid[k] {
            let gi = g.inverse_at(k)?;
            let u2 = gi[0] * u.values[k][0].powi(2) + gi[1] * u.values[k][1].powi(2);
            out.field.values[k] += u2 / (2.0 * m) - 0.5 * m;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{evolve, gaussian_packet, plane_wave_field, EnergyBranch, EvolveOptions};
    use crate::geometry::{Axis, AxisKind, Grid};
    use crate::madelung::pair::decompose;
    use crate::numerics::loglog_slope;
    use num_complex::Complex64;

    fn static_line(n: usize) -> Grid {
        Grid::line(Axis::span(AxisKind::X, -5.0, 5.0, n)).unwrap()
    }

    #[test]
    fn constant_r_has_no_quantum_potential() {
        let g = static_line(41);
        let psi = Field::filled(&g, Complex64::new(0.3, 0.4));
        let q = quantum_potential(&decompose(&psi, 1e-10).unwrap(), &MetricField::flat(&g), 1.0).unwrap();
        assert!(q.field.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn gaussian_quantum_potential_matches_closed_form() {
        // R = exp(-x^2 / 4 s^2): V_Q = R'' / (2 m R) = [x^2/(4 s^4) - 1/(2 s^2)] / 2m
        let (s, m) = (0.8f64, 1.7);
        let exact = |x: f64| (x * x / (4.0 * s.powi(4)) - 1.0 / (2.0 * s * s)) / (2.0 * m);
        let mut errs = vec![];
        let mut hs = vec![];
        for n in [101, 201, 401] {
            let g = Grid::line(Axis::span(AxisKind::X, -2.0, 2.0, n)).unwrap();
            let psi = Field::from_fn(&g, |q| Complex64::new((-q[1] * q[1] / (4.0 * s * s)).exp(), 0.0));
            let q = quantum_potential(&decompose(&psi, 1e-10).unwrap(), &MetricField::flat(&g), m).unwrap();
            let err = (0..g.len())
                .filter(|k| g.is_interior(*k, 1))
                .map(|k| (q.field.values[k] - exact(g.position(k)[1])).abs())
                .fold(0.0, f64::max);
            errs.push(err);
            hs.push(g.axis(0).spacing);
        }
        assert!(errs[2] < 1e-4);
        assert!((loglog_slope(&hs, &errs) - 2.0).abs() < 0.2);
    }

    #[test]
    fn cosine_quantum_potential_is_constant() {
        let (k, m) = (1.3, 0.9);
        let g = Grid::line(Axis::span(AxisKind::X, -1.0, 1.0, 2001)).unwrap();
        let psi = Field::from_fn(&g, |q| Complex64::new((k * q[1]).cos(), 0.0));
        let q = quantum_potential(&decompose(&psi, 1e-10).unwrap(), &MetricField::flat(&g), m).unwrap();
        let want = -k * k / (2.0 * m);
        for i in 1..g.len() - 1 {
            assert!((q.field.values[i] - want).abs() < 1e-6);
        }
    }

    #[test]
    fn plane_wave_and_rest_state_satisfy_both_equations() {
        let m = 1.0;
        let x = Axis::periodic(AxisKind::X, 0.0, 10.0, 100);
        let g = Grid::spacetime(Axis::span(AxisKind::T, 0.0, 1.0, 11), x).unwrap();
        let flat = MetricField::flat(&g);
        for p in [0.0, 2.0 * PI * 2.0 / 10.0] {
            let psi = plane_wave_field(&g, p, m, EnergyBranch::Positive);
            let mp = decompose(&psi, 1e-10).unwrap();
            let hj = hamilton_jacobi_residual(&mp, &flat, &Physics::with_mass(m), &PotentialConfig::free()).unwrap();
            let ct = continuity_residual(&mp, &flat, &Physics::with_mass(m), &PotentialConfig::free()).unwrap();
            assert!(hj.field.max_abs() < 1e-10, "{}", hj.field.max_abs());
            assert!(ct.field.max_abs() < 1e-10);
        }
    }

    #[test]
    fn evolved_packet_residuals_converge_at_second_order() {
        let m = 1.0;
        let phys = Physics::with_mass(m);
        let (mut hs, mut hj_err, mut ct_err) = (vec![], vec![], vec![]);
        for n in [200, 400, 800, 1600] {
            let x = Axis::periodic(AxisKind::X, -10.0, 20.0, n);
            let init = gaussian_packet(x, 0.0, 1.0, 0.8, m, EnergyBranch::Positive).unwrap();
            let dt = 0.5 * x.spacing;
            let ev = evolve(&init, &PotentialConfig::free(), &phys, &EvolveOptions { dt, steps: (1.0 / dt).round() as usize, record_every: 1 }).unwrap();
            let mp = decompose(&ev.history, 1e-8).unwrap();
            let flat = MetricField::flat(mp.grid());
            let rmax = mp.r.max_abs();
            let core = |k: usize| mp.r.values[k] > 1e-2 * rmax && mp.grid().is_interior(k, 2);
            let hj = hamilton_jacobi_residual(&mp, &flat, &phys, &PotentialConfig::free()).unwrap();
            let ct = continuity_residual(&mp, &flat, &phys, &PotentialConfig::free()).unwrap();
            hs.push(x.spacing);
            hj_err.push(hj.max_abs_where(core));
            ct_err.push(ct.max_abs_where(core));
        }
        let (a, b) = (loglog_slope(&hs, &hj_err), loglog_slope(&hs, &ct_err));
        assert!((a - 2.0).abs() < 0.2, "HJ slope {a}: {hj_err:?}");
        assert!((b - 2.0).abs() < 0.2, "continuity slope {b}: {ct_err:?}");
    }
}
