//! Covariant differential operators on diagonal metrics.

use super::grid::{Field, ScalarField};
use super::metric::{Coordinates, MetricField, SINGULAR_THRESHOLD};
use crate::numerics::{d1, d2};
use crate::{Error, Result};

/// Christoffel symbols `Gamma^l_mn`, indexed `[l][m][n]`, per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelField {
    pub values: Vec<[[[f64; 4]; 4]; 4]>,
}

impl ChristoffelField {
    pub fn at(&self, point: usize) -> &[[[f64; 4]; 4]; 4] {
        &self.values[point]
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|g| g.iter().flatten().flatten())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `Gamma^l_mn = 1/2 g^ll (d_m g_ln + d_n g_lm - d_l g_mn)` with centred
/// differences of the stored components.
pub fn christoffel_from_metric(g: &MetricField) -> Result<ChristoffelField> {
    for (k, c) in g.components.iter().enumerate() {
        for (axis, v) in c.iter().enumerate() {
            if v.abs() < SINGULAR_THRESHOLD {
                return Err(Error::SingularMetric { point: k, axis, value: *v });
            }
        }
    }
    let grid = &g.grid;
    // dg[k][mu][c] = d_mu g_cc at point k
    let mut dg = vec![[[0.0f64; 4]; 4]; grid.len()];
    for (axis, a) in grid.axes().iter().enumerate() {
        let mu = a.kind.component();
        for c in 0..4 {
            let comp = Field::new(grid.clone(), g.components.iter().map(|gc| gc[c]).collect())?;
            let d = comp.partial(axis)?;
            for (k, v) in d.values.iter().enumerate() {
                dg[k][mu][c] = *v;
            }
        }
    }
    let values = g
        .components
        .iter()
        .zip(&dg)
        .map(|(gc, d)| {
            let mut gamma = [[[0.0; 4]; 4]; 4];
            for l in 0..4 {
                for m in 0..4 {
                    for n in 0..4 {
                        let mut s = 0.0;
                        if n == l {
                            s += d[m][l];
                        }
                        if m == l {
                            s += d[n][l];
                        }
                        if m == n {
                            s -= d[l][m];
                        }
                        gamma[l][m][n] = 0.5 * s / gc[l];
                    }
                }
            }
            gamma
        })
        .collect();
    Ok(ChristoffelField { values })
}

/// Face weights `w_{i-1/2}` (length `n + 1`) for the flux form
/// `d(w df)`. Interior faces average neighbours; the outer faces are
/// linear extrapolations, except the `r = 0` face of a cell-centred
/// spherical axis which carries zero weight.
pub fn face_weights(w: &[f64], zero_inner_face: bool) -> Vec<f64> {
    let n = w.len();
    let mut faces = vec![0.0; n + 1];
    for i in 1..n {
        faces[i] = 0.5 * (w[i - 1] + w[i]);
    }
    faces[0] = if zero_inner_face { 0.0 } else { 0.5 * (3.0 * w[0] - w[1]) };
    faces[n] = 0.5 * (3.0 * w[n - 1] - w[n - 2]);
    faces
}

/// One-dimensional flux-form operator `(1/v) d_a (w d_a f)` along a line,
/// with `w = sqrt|g| g^aa` and `v = sqrt|g|`. On spherical grids the areal
/// factor is evaluated exactly at faces (`r^2`) and as the cell average
/// `(r+^3 - r-^3) / 3h` in the volume, so `-laplacian(r^2) = -6` holds to
/// roundoff.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxOperator {
    pub spacing: f64,
    pub faces: Vec<f64>,
    pub weights: Vec<f64>,
    pub point_volume: Vec<f64>,
    pub volume: Vec<f64>,
    pub zero_inner_face: bool,
    pub periodic: bool,
}

impl FluxOperator {
    pub fn along(g: &MetricField, axis: usize, start: usize) -> Self {
        let a = *g.grid.axis(axis);
        let stride = g.grid.stride(axis);
        let comp = a.kind.component();
        let spherical = g.coordinates == Coordinates::Spherical && a.kind == super::grid::AxisKind::R;
        let zero_inner_face = spherical && a.is_cell_centred_radial();
        let h = a.spacing;
        let mut metric_w = Vec::with_capacity(a.count);
        let mut metric_v = Vec::with_capacity(a.count);
        for i in 0..a.count {
            let c = g.components[start + i * stride];
            let v = (c[0] * c[1] * c[2] * c[3]).abs().sqrt();
            metric_w.push(v / c[comp]);
            metric_v.push(v);
        }
        let areal = |r: f64| if spherical { r * r } else { 1.0 };
        let cell = |r: f64| {
            if spherical {
                let (lo, hi) = (r - 0.5 * h, r + 0.5 * h);
                (hi * hi * hi - lo * lo * lo) / (3.0 * h)
            } else {
                1.0
            }
        };
        let mut faces = face_weights(&metric_w, zero_inner_face);
        if a.periodic {
            let wrap = 0.5 * (metric_w[0] + metric_w[a.count - 1]);
            faces[0] = wrap;
            faces[a.count] = wrap;
        }
        for (i, f) in faces.iter_mut().enumerate() {
            *f *= areal(a.origin + h * (i as f64 - 0.5));
        }
        let coords = a.coords();
        let weights = metric_w.iter().zip(&coords).map(|(w, r)| w * areal(*r)).collect();
        let point_volume = metric_v.iter().zip(&coords).map(|(v, r)| v * areal(*r)).collect();
        let volume = metric_v.iter().zip(&coords).map(|(v, r)| v * cell(*r)).collect();
        FluxOperator { spacing: h, faces, weights, point_volume, volume, zero_inner_face, periodic: a.periodic }
    }

    /// Apply the operator to line data `f`. Interior points use the
    /// conservative stencil; end points use second-order one-sided
    /// differences of the expanded form `(w f'' + w' f') / v`.
    pub fn apply<T>(&self, f: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let n = f.len();
        let h2 = self.spacing * self.spacing;
        (0..n)
            .map(|i| {
                let interior = i > 0 && i + 1 < n;
                if self.periodic {
                    let (l, r) = ((i + n - 1) % n, (i + 1) % n);
                    let flux = (f[r] - f[i]) * self.faces[i + 1] - (f[i] - f[l]) * self.faces[i];
                    flux * (1.0 / (h2 * self.volume[i]))
                } else if interior || (i == 0 && self.zero_inner_face) {
                    let right = (f[i + 1] - f[i]) * self.faces[i + 1];
                    let flux = if i == 0 { right } else { right - (f[i] - f[i - 1]) * self.faces[i] };
                    flux * (1.0 / (h2 * self.volume[i]))
                } else {
                    let dw = d1(&self.weights, i, self.spacing);
                    (d2(f, i, self.spacing) * self.weights[i] + d1(f, i, self.spacing) * dw) * (1.0 / self.point_volume[i])
                }
            })
            .collect()
    }
}

/// `Box f = (1/sqrt|g|) d_mu (sqrt|g| g^mu_mu d_mu f)`; on the flat metric
/// this is `d_t^2 f - d_x^2 f` (or `-laplacian` for static fields).
pub fn dalembertian<T>(f: &Field<T>, g: &MetricField) -> Result<Field<T>>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    if f.grid != g.grid {
        return Err(Error::Domain("field and metric live on different grids".into()));
    }
    for a in f.grid.axes() {
        if a.count < 3 {
            return Err(Error::Domain(format!("axis {} has fewer than 3 points", a.kind.label())));
        }
    }
    let mut out = vec![T::default(); f.values.len()];
    for axis in 0..f.grid.ndim() {
        let stride = f.grid.stride(axis);
        for start in f.grid.line_starts(axis) {
            let op = FluxOperator::along(g, axis, start);
            let line = f.line(axis, start);
            for (i, v) in op.apply(&line).into_iter().enumerate() {
                let k = start + i * stride;
                out[k] = out[k] + v;
            }
        }
    }
    Field::new(f.grid.clone(), out)
}

/// `d^mu f = g^mu_mu d_mu f` for every active component.
pub fn gradient_up(f: &ScalarField, g: &MetricField) -> Result<Field<[f64; 4]>> {
    let mut out = vec![[0.0; 4]; f.values.len()];
    for (axis, a) in f.grid.axes().iter().enumerate() {
        let c = a.kind.component();
        let d = f.partial(axis)?;
        for (k, v) in d.values.iter().enumerate() {
            out[k][c] = v / g.components[k][c];
        }
    }
    Field::new(f.grid.clone(), out)
}

/// `nabla_mu V^mu = (1/sqrt|g|) d_mu (sqrt|g| V^mu)`.
pub fn divergence(v: &Field<[f64; 4]>, g: &MetricField) -> Result<ScalarField> {
    let mut out = vec![0.0; v.values.len()];
    let vol: Vec<f64> = (0..v.values.len()).map(|k| g.sqrt_abs_det(k)).collect();
    for (axis, a) in v.grid.axes().iter().enumerate() {
        let c = a.kind.component();
        let flux = Field::new(v.grid.clone(), v.values.iter().zip(&vol).map(|(x, s)| x[c] * s).collect())?;
        let d = flux.partial(axis)?;
        for (k, dv) in d.values.iter().enumerate() {
            out[k] += dv / vol[k];
        }
    }
    Field::new(v.grid.clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::{Axis, AxisKind, Grid};
    use crate::numerics::loglog_slope;

    fn spacetime(n: usize) -> Grid {
        Grid::spacetime(Axis::span(AxisKind::T, 0.0, 1.0, n), Axis::span(AxisKind::X, 0.0, 2.0, n)).unwrap()
    }

    #[test]
    fn dalembertian_of_quadratics() {
        let grid = spacetime(12);
        let g = MetricField::flat(&grid);
        let t2 = dalembertian(&Field::from_fn(&grid, |p| p[0] * p[0]), &g).unwrap();
        let x2 = dalembertian(&Field::from_fn(&grid, |p| p[1] * p[1]), &g).unwrap();
        for k in 0..grid.len() {
            if grid.is_interior(k, 1) {
                assert!((t2.values[k] - 2.0).abs() < 1e-10);
                assert!((x2.values[k] + 2.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dalembertian_static_sine_second_order() {
        let mut hs = vec![];
        let mut errs = vec![];
        for n in [41, 81, 161, 321] {
            let grid = Grid::line(Axis::span(AxisKind::X, 0.0, 6.0, n)).unwrap();
            let g = MetricField::flat(&grid);
            let f = Field::from_fn(&grid, |p| p[1].sin());
            let b = dalembertian(&f, &g).unwrap();
            let err = (0..grid.len())
                .filter(|k| grid.is_interior(*k, 2))
                .map(|k| (b.values[k] - grid.position(k)[1].sin()).abs())
                .fold(0.0, f64::max);
            hs.push(grid.axis(0).spacing);
            errs.push(err);
        }
        let slope = loglog_slope(&hs, &errs);
        assert!((slope - 2.0).abs() < 0.2, "slope {slope}");
    }

    #[test]
    fn curved_dalembertian_second_order() {
        // g00 = 1 + 2 phi(x), gxx = -(1 - 2 phi(x)); static f = cos(x).
        let phi = |x: f64| 0.05 * (0.7 * x).sin();
        let dphi = |x: f64| 0.035 * (0.7 * x).cos();
        let exact = |x: f64| {
            // Box f = (1/s) d(s gxx^-1 f') with s = sqrt(g00 |gxx|)
            let a = 1.0 + 2.0 * phi(x);
            let b = 1.0 - 2.0 * phi(x);
            let s = (a * b).sqrt();
            let w = -s / b;
            let ds = (2.0 * dphi(x) * b - 2.0 * dphi(x) * a) / (2.0 * s);
            let dw = -(ds * b + s * 2.0 * dphi(x)) / (b * b);
            (dw * (-x.sin()) + w * (-x.cos())) / s
        };
        let mut hs = vec![];
        let mut errs = vec![];
        for n in [41, 81, 161, 321] {
            let grid = Grid::line(Axis::span(AxisKind::X, 0.0, 6.0, n)).unwrap();
            let g = MetricField::weak_field(&grid, &grid.axis(0).coords().iter().map(|x| phi(*x)).collect::<Vec<_>>())
                .unwrap();
            let f = Field::from_fn(&grid, |p| p[1].cos());
            let b = dalembertian(&f, &g).unwrap();
            let err = (0..grid.len())
                .filter(|k| grid.is_interior(*k, 2))
                .map(|k| (b.values[k] - exact(grid.position(k)[1])).abs())
                .fold(0.0, f64::max);
            hs.push(grid.axis(0).spacing);
            errs.push(err);
        }
        let slope = loglog_slope(&hs, &errs);
        assert!((slope - 2.0).abs() < 0.2, "slope {slope}");
    }

    #[test]
    fn spherical_laplacian_of_quadratic() {
        // -laplacian(r^2) = -6 in three dimensions.
        let grid = Grid::line(Axis::radial(2.0, 40)).unwrap();
        let g = MetricField::flat(&grid);
        let f = Field::from_fn(&grid, |p| p[1] * p[1]);
        let b = dalembertian(&f, &g).unwrap();
        for k in 0..grid.len() - 1 {
            assert!((b.values[k] + 6.0).abs() < 1e-9, "k={k} {}", b.values[k]);
        }
    }

    #[test]
    fn christoffel_zero_for_constant_metrics() {
        let grid = spacetime(10);
        let flat = MetricField::flat(&grid);
        assert_eq!(christoffel_from_metric(&flat).unwrap().max_abs(), 0.0);
        let eps = 0.0137;
        let g = MetricField::new(&grid, vec![[1.0, -(1.0 + eps), -1.0, -1.0]; grid.len()]).unwrap();
        assert_eq!(christoffel_from_metric(&g).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn christoffel_weak_field_linear_potential() {
        let grid = Grid::line(Axis::radial(10.0, 50)).unwrap();
        let slope = 1e-4;
        let phi: Vec<f64> = grid.axis(0).coords().iter().map(|r| slope * r).collect();
        let g = MetricField::weak_field(&grid, &phi).unwrap();
        let gamma = christoffel_from_metric(&g).unwrap();
        for k in 0..grid.len() {
            let gm = gamma.at(k);
            // Gamma^r_tt = Phi' + O(Phi^2)
            assert!((gm[1][0][0] - slope).abs() < 1e-6);
            assert!((gm[0][0][1] - gm[0][1][0]).abs() == 0.0);
        }
    }

    #[test]
    fn christoffel_singular_metric() {
        let grid = spacetime(10);
        let mut g = MetricField::flat(&grid);
        g.components[5][0] = 1e-13;
        assert!(matches!(christoffel_from_metric(&g), Err(Error::SingularMetric { .. })));
    }
}
