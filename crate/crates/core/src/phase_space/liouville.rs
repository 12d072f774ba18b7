use super::distribution::{GaussianCarrier, PhaseGrid, PhaseSpaceDistribution, SampledCarrier};
use crate::numerics::d1;
use crate::{Error, Result};

/// Force `f^1` acting on the spatial momentum.
#[derive(Debug, Clone, PartialEq)]
pub enum Force {
    Zero,
    Uniform(f64),
    /// One value per `(t, x)` node of the carrier grid, row-major.
    Sampled(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResidual {
    pub grid: PhaseGrid,
    pub values: Vec<f64>,
}

impl PhaseResidual {
    pub fn interior_max_abs(&self, collar: usize) -> f64 {
        (0..self.values.len())
            .filter(|k| self.grid.is_interior(*k, collar))
            .fold(0.0, |m, k| m.max(self.values[k].abs()))
    }
}

/// `(p^a / m) dF/dx^a + f^a dF/dp^a` on the mass shell:
/// `(p0/m) dF/dt + (p1/m) dF/dx + f1 dF/dp1`.
pub fn liouville_residual(dist: &PhaseSpaceDistribution, force: &Force, mass: f64) -> Result<PhaseResidual> {
    dist.validate()?;
    match dist {
        PhaseSpaceDistribution::Sampled(c) => sampled_residual(c, force, mass),
        PhaseSpaceDistribution::Gaussian(g) => closed_form_residual(std::slice::from_ref(g), force, mass),
        PhaseSpaceDistribution::Mixture(gs) => closed_form_residual(gs, force, mass),
    }
}

fn force_at(force: &Force, it: usize, ix: usize, nx: usize) -> f64 {
    match force {
        Force::Zero => 0.0,
        Force::Uniform(f) => *f,
        Force::Sampled(v) => v[it * nx + ix],
    }
}

fn sampled_residual(c: &SampledCarrier, force: &Force, mass: f64) -> Result<PhaseResidual> {
    let g = &c.grid;
    let (nt, nx, np) = (g.nt(), g.x.count, g.p.count);
    if let Force::Sampled(v) = force {
        if v.len() != nt * nx {
            return Err(Error::Domain("sampled force must have one value per (t, x) node".into()));
        }
    }
    if !mass.is_finite() || mass <= 0.0 {
        return Err(Error::Domain("mass must be positive".into()));
    }
    let mut out = vec![0.0; g.len()];
    for it in 0..nt {
        for ix in 0..nx {
            let line = c.momentum_line(it, ix);
            let f1 = force_at(force, it, ix, nx);
            for ip in 0..np {
                let p = g.p.coord(ip);
                let xline: Vec<f64> = (0..nx).map(|j| c.values[g.index(it, j, ip)]).collect();
                let mut r = p / mass * d1(&xline, ix, g.x.spacing);
                if f1 != 0.0 {
                    r += f1 * d1(line, ip, g.p.spacing);
                }
                if let Some(ta) = g.t {
                    let tline: Vec<f64> = (0..nt).map(|j| c.values[g.index(j, ix, ip)]).collect();
                    r += c.energy(p) / mass * d1(&tline, it, ta.spacing);
                }
                out[g.index(it, ix, ip)] = r;
            }
        }
    }
    Ok(PhaseResidual { grid: g.clone(), values: out })
}

fn closed_form_residual(gs: &[GaussianCarrier], force: &Force, mass: f64) -> Result<PhaseResidual> {
    let f1 = match force {
        Force::Zero => 0.0,
        Force::Uniform(f) => *f,
        Force::Sampled(_) => {
            return Err(Error::UnsupportedCarrier(
                "closed-form Gaussian carriers only accept zero or uniform forces".into(),
            ))
        }
    };
    let grid = PhaseGrid::around(&gs[0], 5.0, 41)?;
    let values = (0..grid.len())
        .map(|k| {
            let (t, x, p) = grid.coords(k);
            let e = (mass * mass + p * p).sqrt();
            gs.iter()
                .map(|g| {
                    let f = g.density(t, x, p);
                    let dt = g.sigma_t.map_or(0.0, |s| -(t - g.mean_t) / (s * s) * f);
                    let dx = -(x - g.mean_x) / (g.sigma_x * g.sigma_x) * f;
                    let dp = -(p - g.mean_p1) / (g.sigma_p1 * g.sigma_p1) * f;
                    e / mass * dt + p / mass * dx + f1 * dp
                })
                .sum()
        })
        .collect();
    Ok(PhaseResidual { grid, values })
}
