use serde::{Deserialize, Serialize};

use crate::geometry::{Axis, AxisKind};
use crate::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

fn normal(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * SQRT_2PI)
}

/// Closed-form Gaussian joint density over `(t, x, p0, p1)` with diagonal
/// covariance. A missing time width means the density is uniform in `t`
/// (a spatial slice); a zero energy width puts `p0` on a delta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianCarrier {
    /// Total weight (integral over the carrier).
    #[serde(default = "one")]
    pub weight: f64,
    #[serde(default)]
    pub mean_t: f64,
    pub mean_x: f64,
    #[serde(default)]
    pub sigma_t: Option<f64>,
    pub sigma_x: f64,
    pub mean_p0: f64,
    pub mean_p1: f64,
    #[serde(default)]
    pub sigma_p0: f64,
    pub sigma_p1: f64,
}

fn one() -> f64 {
    1.0
}

impl GaussianCarrier {
    /// Unit-weight spatial slice with on-average on-shell energy.
    pub fn slice(mean_x: f64, sigma_x: f64, mean_p1: f64, sigma_p1: f64, mass: f64) -> Self {
        GaussianCarrier {
            weight: 1.0,
            mean_t: 0.0,
            mean_x,
            sigma_t: None,
            sigma_x,
            mean_p0: (mass * mass + mean_p1 * mean_p1).sqrt(),
            mean_p1,
            sigma_p0: 0.0,
            sigma_p1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.weight >= 0.0
            && self.weight.is_finite()
            && self.sigma_x > 0.0
            && self.sigma_p1 > 0.0
            && self.sigma_p0 >= 0.0
            && self.sigma_t.is_none_or(|s| s > 0.0)
            && [self.mean_t, self.mean_x, self.mean_p0, self.mean_p1].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Integration("Gaussian carrier is not normalizable (widths must be > 0)".into()))
        }
    }

    /// Configuration-space marginal `int F d^4p` at `(t, x)`.
    pub fn marginal(&self, t: f64, x: f64) -> f64 {
        let mut v = self.weight * normal(x, self.mean_x, self.sigma_x);
        if let Some(st) = self.sigma_t {
            v *= normal(t, self.mean_t, st);
        }
        v
    }

    /// Slice density `F(t, x, p1)` with `p0` integrated out.
    pub fn density(&self, t: f64, x: f64, p1: f64) -> f64 {
        self.marginal(t, x) * normal(p1, self.mean_p1, self.sigma_p1)
    }
}

/// Phase-space layout for sampled carriers: optional `t`, then `x`, then the
/// spatial momentum `p1`; storage is row-major in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub t: Option<Axis>,
    pub x: Axis,
    pub p: Axis,
}

impl PhaseGrid {
    pub fn new(t: Option<Axis>, x: Axis, p: Axis) -> Result<Self> {
        for a in t.iter().chain([&x, &p]) {
            if !(a.spacing > 0.0) || a.count < 3 {
                return Err(Error::InvalidGrid("phase-space axes need spacing > 0 and >= 3 points".into()));
            }
        }
        Ok(PhaseGrid { t, x, p })
    }

    pub fn nt(&self) -> usize {
        self.t.map_or(1, |a| a.count)
    }

    pub fn len(&self) -> usize {
        self.nt() * self.x.count * self.p.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, it: usize, ix: usize, ip: usize) -> usize {
        (it * self.x.count + ix) * self.p.count + ip
    }

    /// `(t, x, p)` coordinates of a flat index.
    pub fn coords(&self, k: usize) -> (f64, f64, f64) {
        let ip = k % self.p.count;
        let ix = (k / self.p.count) % self.x.count;
        let it = k / (self.p.count * self.x.count);
        (self.t.map_or(0.0, |a| a.coord(it)), self.x.coord(ix), self.p.coord(ip))
    }

    pub fn is_interior(&self, k: usize, collar: usize) -> bool {
        let ip = k % self.p.count;
        let ix = (k / self.p.count) % self.x.count;
        let it = k / (self.p.count * self.x.count);
        let inside = |i: usize, n: usize| i >= collar && i + collar < n;
        inside(ip, self.p.count) && inside(ix, self.x.count) && self.t.is_none_or(|a| inside(it, a.count))
    }

    /// Layout covering `mean +- width * sigma` on each axis.
    pub fn around(g: &GaussianCarrier, width: f64, n: usize) -> Result<Self> {
        let t = g.sigma_t.map(|s| Axis::span(AxisKind::T, g.mean_t - width * s, g.mean_t + width * s, n));
        PhaseGrid::new(
            t,
            Axis::span(AxisKind::X, g.mean_x - width * g.sigma_x, g.mean_x + width * g.sigma_x, n),
            Axis::span(AxisKind::X, g.mean_p1 - width * g.sigma_p1, g.mean_p1 + width * g.sigma_p1, n),
        )
    }
}

/// Nonnegative samples of `F(t, x, p1)` on the mass shell
/// `p0 = sqrt(m^2 + p1^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCarrier {
    pub grid: PhaseGrid,
    pub mass: f64,
    pub values: Vec<f64>,
}

impl SampledCarrier {
    pub fn new(grid: PhaseGrid, mass: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain("sample count does not match phase grid".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Integration(format!("carrier must be finite and nonnegative, found {v}")));
        }
        Ok(SampledCarrier { grid, mass, values })
    }

    pub fn from_fn(grid: PhaseGrid, mass: f64, f: impl Fn(f64, f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|k| {
                let (t, x, p) = grid.coords(k);
                f(t, x, p)
            })
            .collect();
        SampledCarrier::new(grid, mass, values)
    }

    pub fn energy(&self, p1: f64) -> f64 {
        (self.mass * self.mass + p1 * p1).sqrt()
    }

    /// Momentum line `F(t_i, x_j, .)`.
    pub fn momentum_line(&self, it: usize, ix: usize) -> &[f64] {
        let start = self.grid.index(it, ix, 0);
        &self.values[start..start + self.grid.p.count]
    }
}

/// Joint density `F(x, p)` on a sampled or closed-form carrier.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseSpaceDistribution {
    Gaussian(GaussianCarrier),
    /// Nonnegative weighted sum of Gaussians (weights live in each carrier).
    Mixture(Vec<GaussianCarrier>),
    Sampled(SampledCarrier),
}

impl PhaseSpaceDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            PhaseSpaceDistribution::Gaussian(g) => g.validate(),
            PhaseSpaceDistribution::Mixture(gs) => {
                if gs.is_empty() {
                    return Err(Error::Integration("empty mixture".into()));
                }
                gs.iter().try_for_each(|g| g.validate())
            }
            PhaseSpaceDistribution::Sampled(_) => Ok(()),
        }
    }

    /// Sample a closed-form carrier onto a mass-shell phase grid.
    pub fn sample(&self, grid: &PhaseGrid, mass: f64) -> Result<SampledCarrier> {
        self.validate()?;
        match self {
            PhaseSpaceDistribution::Gaussian(g) => SampledCarrier::from_fn(grid.clone(), mass, |t, x, p| g.density(t, x, p)),
            PhaseSpaceDistribution::Mixture(gs) => SampledCarrier::from_fn(grid.clone(), mass, |t, x, p| {
                gs.iter().map(|g| g.density(t, x, p)).sum()
            }),
            PhaseSpaceDistribution::Sampled(s) => Ok(s.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_slice_normalized() {
        let g = GaussianCarrier::slice(0.3, 0.7, 0.2, 0.4, 1.0);
        let grid = PhaseGrid::around(&g, 9.0, 161).unwrap();
        let s = PhaseSpaceDistribution::Gaussian(g).sample(&grid, 1.0).unwrap();
        let (hx, hp) = (grid.x.spacing, grid.p.spacing);
        let total: f64 = s.values.iter().sum::<f64>() * hx * hp;
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_negative_samples_and_bad_widths() {
        let grid = PhaseGrid::new(None, Axis::span(AxisKind::X, 0.0, 1.0, 5), Axis::span(AxisKind::X, 0.0, 1.0, 5)).unwrap();
        let mut v = vec![1.0; grid.len()];
        v[3] = -0.5;
        assert!(SampledCarrier::new(grid, 1.0, v).is_err());
        let mut g = GaussianCarrier::slice(0.0, 1.0, 0.0, 1.0, 1.0);
        g.sigma_p1 = 0.0;
        assert!(matches!(g.validate(), Err(Error::Integration(_))));
    }
}
