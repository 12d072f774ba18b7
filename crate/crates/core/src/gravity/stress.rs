use crate::geometry::{Grid, MetricField};
use crate::madelung::{phase_gradient, MadelungPair};
use crate::{Error, Result};

/// Symmetric stress tensor per grid point in the local orthonormal frame,
/// `T_hat_mu_nu = T_mu_nu / sqrt|g_mu_mu g_nu_nu|`.
#[derive(Debug, Clone, PartialEq)]
pub struct StressTensor {
    pub grid: Grid,
    pub components: Vec<[[f64; 4]; 4]>,
}

impl StressTensor {
    pub fn zero(grid: &Grid) -> Self {
        StressTensor { grid: grid.clone(), components: vec![[[0.0; 4]; 4]; grid.len()] }
    }

    /// Pressureless matter at rest with energy density `rho`.
    pub fn dust(grid: &Grid, rho: &[f64]) -> Result<Self> {
        if rho.len() != grid.len() {
            return Err(Error::Domain("density sample count does not match grid".into()));
        }
        let mut t = StressTensor::zero(grid);
        for (c, r) in t.components.iter_mut().zip(rho) {
            c[0][0] = *r;
        }
        Ok(t)
    }

    pub fn add(&self, other: &StressTensor) -> Result<StressTensor> {
        if self.grid != other.grid {
            return Err(Error::Domain("stress tensors live on different grids".into()));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| {
                let mut c = *a;
                for i in 0..4 {
                    for j in 0..4 {
                        c[i][j] += b[i][j];
                    }
                }
                c
            })
            .collect();
        Ok(StressTensor { grid: self.grid.clone(), components })
    }

    /// Active gravitational mass density `T_hat_00 + sum_i T_hat_ii`
    /// (energy density plus three times the mean pressure).
    pub fn active_density(&self) -> Vec<f64> {
        self.components.iter().map(|c| c[0][0] + c[1][1] + c[2][2] + c[3][3]).collect()
    }
}

/// `T_(Q)mu_nu = rho' u_mu u_nu` with `rho' = m R^2` and `u_mu = d_mu S / m`.
/// The grid is static, so the time derivative of the phase is supplied as
/// `d_t S = -energy`.
#[derive(Debug, Clone)]
pub struct QuantumStressTensor {
    pub rho_prime: Vec<f64>,
    /// Lower-index statistical four-velocity.
    pub u: Vec<[f64; 4]>,
    /// Coordinate components `T_mu_nu`.
    pub coordinate: Vec<[[f64; 4]; 4]>,
    pub frame: StressTensor,
}

pub fn matter_tensor(mp: &MadelungPair, g: &MetricField, mass: f64, energy: f64) -> Result<QuantumStressTensor> {
    if mp.grid() != &g.grid {
        return Err(Error::Domain("Madelung pair and metric live on different grids".into()));
    }
    if !(mass > 0.0) {
        return Err(Error::Config("mass must be positive".into()));
    }
    if mp.grid().time_axis().is_some() {
        return Err(Error::Config("the quantum stress tensor is built on a static grid".into()));
    }
    let ds = phase_gradient(mp)?;
    let n = mp.grid().len();
    let mut rho_prime = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut coordinate = Vec::with_capacity(n);
    let mut frame = Vec::with_capacity(n);
    for k in 0..n {
        let rho = mass * mp.r.values[k] * mp.r.values[k];
        let mut uk = ds.values[k].map(|v| v / mass);
        uk[0] = -energy / mass;
        let gk = g.at(k)?;
        let mut t = [[0.0; 4]; 4];
        let mut hat = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                t[i][j] = rho * uk[i] * uk[j];
                hat[i][j] = t[i][j] / (gk[i] * gk[j]).abs().sqrt();
            }
        }
        rho_prime.push(rho);
        u.push(uk);
        coordinate.push(t);
        frame.push(hat);
    }
    Ok(QuantumStressTensor {
        rho_prime,
        u,
        coordinate,
        frame: StressTensor { grid: mp.grid().clone(), components: frame },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Axis, Field};
    use crate::madelung::decompose;
    use num_complex::Complex64;

    fn radial_pair(f: impl Fn(f64) -> f64) -> MadelungPair {
        let g = Grid::line(Axis::radial(5.0, 50)).unwrap();
        decompose(&Field::from_fn(&g, |q| Complex64::new(f(q[1]), 0.0)), 1e-12).unwrap()
    }

    #[test]
    fn rest_state_has_energy_density_only() {
        let mp = radial_pair(|r| (-r * r).exp());
        let g = MetricField::flat(mp.grid());
        let t = matter_tensor(&mp, &g, 1.0, 1.0).unwrap();
        for (k, c) in t.coordinate.iter().enumerate() {
            assert!((c[0][0] - mp.r.values[k].powi(2)).abs() < 1e-15);
            for (i, row) in c.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if i + j > 0 {
                        assert_eq!(*v, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn static_state_energy_density_and_rank_one() {
        let (m, e) = (1.5, 1.4);
        let mp = radial_pair(|r| 1.0 / (1.0 + r * r));
        let phi = -0.01;
        let g = MetricField::weak_field(mp.grid(), &vec![phi; mp.grid().len()]).unwrap();
        let t = matter_tensor(&mp, &g, m, e).unwrap();
        for k in 0..mp.grid().len() {
            let want = m * mp.r.values[k].powi(2) * (e / m).powi(2);
            assert!((t.coordinate[k][0][0] - want).abs() < 1e-14);
            assert!((t.frame.components[k][0][0] - want / (1.0 + 2.0 * phi)).abs() < 1e-14);
            let c = t.coordinate[k];
            // 2x2 minors vanish and the tensor is symmetric.
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(c[i][j], c[j][i]);
                    assert!((c[0][0] * c[i][j] - c[0][i] * c[0][j]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn zero_amplitude_region_carries_no_stress() {
        let mp = radial_pair(|r| if r < 2.0 { 1.0 } else { 0.0 });
        let t = matter_tensor(&mp, &MetricField::flat(mp.grid()), 1.0, 1.0).unwrap();
        for (k, c) in t.frame.components.iter().enumerate() {
            if mp.grid().position(k)[1] > 2.0 {
                assert!(c.iter().flatten().all(|v| *v == 0.0));
            }
        }
        let sum = t.frame.add(&StressTensor::dust(mp.grid(), &vec![2.0; 50]).unwrap()).unwrap();
        assert_eq!(sum.active_density()[49], 2.0);
    }
}
