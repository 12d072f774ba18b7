use super::grid::{AxisKind, Grid};
use super::vector::FourVector;
use crate::{Error, Result};

/// Below this magnitude a diagonal metric entry is treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    /// (+, -, -, -)
    MostlyMinus,
}

/// How the spatial sector is measured. On a spherical grid the angular
/// components are stored in an orthonormal frame and the areal factor `r^2`
/// enters `sqrt|g|` explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinates {
    Cartesian,
    Spherical,
}

/// Diagonal metric `g_mu_mu` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    pub grid: Grid,
    pub components: Vec<[f64; 4]>,
    pub signature: Signature,
    pub coordinates: Coordinates,
}

pub const FLAT: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

impl MetricField {
    /// Minkowski metric `diag(1, -1, -1, -1)`. Grids with an `r` axis get
    /// spherical measure.
    pub fn flat(grid: &Grid) -> Self {
        let coordinates = if grid.axis_of_kind(AxisKind::R).is_some() {
            Coordinates::Spherical
        } else {
            Coordinates::Cartesian
        };
        MetricField {
            grid: grid.clone(),
            components: vec![FLAT; grid.len()],
            signature: Signature::MostlyMinus,
            coordinates,
        }
    }

    pub fn new(grid: &Grid, components: Vec<[f64; 4]>) -> Result<Self> {
        let mut g = MetricField::flat(grid);
        if components.len() != grid.len() {
            return Err(Error::Domain("metric component count does not match grid".into()));
        }
        g.components = components;
        g.validate()?;
        Ok(g)
    }

    /// Static weak-field metric `g00 = 1 + 2 Phi`, `g_rr = -(1 - 2 Phi)`,
    /// angular parts flat.
    pub fn weak_field(grid: &Grid, phi: &[f64]) -> Result<Self> {
        let comps = phi.iter().map(|p| [1.0 + 2.0 * p, -(1.0 - 2.0 * p), -1.0, -1.0]).collect();
        MetricField::new(grid, comps)
    }

    pub fn validate(&self) -> Result<()> {
        for (k, c) in self.components.iter().enumerate() {
            for (axis, v) in c.iter().enumerate() {
                if !v.is_finite() || v.abs() < SINGULAR_THRESHOLD {
                    return Err(Error::SingularMetric { point: k, axis, value: *v });
                }
            }
            if !(c[0] > 0.0 && c[1] < 0.0 && c[2] < 0.0 && c[3] < 0.0) {
                return Err(Error::Signature { point: k });
            }
        }
        Ok(())
    }

    pub fn at(&self, point: usize) -> Result<[f64; 4]> {
        self.components
            .get(point)
            .copied()
            .ok_or_else(|| Error::Domain(format!("point {point} outside grid of {} points", self.grid.len())))
    }

    pub fn inverse_at(&self, point: usize) -> Result<[f64; 4]> {
        let g = self.at(point)?;
        Ok([1.0 / g[0], 1.0 / g[1], 1.0 / g[2], 1.0 / g[3]])
    }

    pub fn is_flat(&self) -> bool {
        self.components.iter().all(|c| *c == FLAT)
    }

    /// `sqrt|g|` including the areal factor on spherical grids.
    pub fn sqrt_abs_det(&self, point: usize) -> f64 {
        let c = self.components[point];
        let mut v = (c[0] * c[1] * c[2] * c[3]).abs().sqrt();
        if self.coordinates == Coordinates::Spherical {
            let r = self.grid.position(point)[1];
            v *= r * r;
        }
        v
    }

    /// Largest `|g_mu_mu - eta_mu_mu|` over the grid.
    pub fn max_deviation_from_flat(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter().zip(FLAT.iter()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

/// `g_mu_nu a^mu b^nu` at a grid point.
pub fn minkowski_dot(a: &FourVector, b: &FourVector, g: &MetricField, point: usize) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain("non-finite four-vector".into()));
    }
    let gm = g.at(point)?;
    Ok((0..4).map(|i| gm[i] * a.0[i] * b.0[i]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::Axis;

    fn line() -> Grid {
        Grid::line(Axis::span(AxisKind::X, 0.0, 1.0, 10)).unwrap()
    }

    #[test]
    fn dot_products_follow_signature() {
        let g = MetricField::flat(&line());
        let e0 = FourVector::new(1.0, 0.0, 0.0, 0.0);
        let e1 = FourVector::new(0.0, 1.0, 0.0, 0.0);
        assert_eq!(minkowski_dot(&e0, &e0, &g, 0).unwrap(), 1.0);
        assert_eq!(minkowski_dot(&e1, &e1, &g, 0).unwrap(), -1.0);
        let (m, p) = (1.0f64, 0.5f64);
        let e = (p * p + m * m).sqrt();
        let v = FourVector::new(e, p, 0.0, 0.0);
        assert!((minkowski_dot(&v, &v, &g, 3).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dot_outside_grid_is_domain_error() {
        let g = MetricField::flat(&line());
        let e0 = FourVector::new(1.0, 0.0, 0.0, 0.0);
        assert!(matches!(minkowski_dot(&e0, &e0, &g, 99), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_wrong_signature_and_singular_entries() {
        let grid = line();
        let mut c = vec![FLAT; grid.len()];
        c[2] = [-1.0, -1.0, -1.0, -1.0];
        assert!(matches!(MetricField::new(&grid, c), Err(Error::Signature { point: 2 })));
        let mut c = vec![FLAT; grid.len()];
        c[4][1] = 1e-13;
        assert!(matches!(MetricField::new(&grid, c), Err(Error::SingularMetric { point: 4, axis: 1, .. })));
    }

    #[test]
    fn flat_constructor_is_exact() {
        let g = MetricField::flat(&line());
        assert!(g.is_flat());
        assert_eq!(g.max_deviation_from_flat(), 0.0);
    }
}
