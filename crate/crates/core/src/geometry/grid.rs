use serde::{Deserialize, Serialize};

use crate::numerics::Stencil;
use crate::{Error, Result};

/// Coordinate carried by a grid axis. `T` maps to four-vector component 0,
/// `X` and `R` map to component 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisKind {
    T,
    X,
    R,
}

impl AxisKind {
    pub fn component(self) -> usize {
        match self {
            AxisKind::T => 0,
            AxisKind::X | AxisKind::R => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AxisKind::T => "t",
            AxisKind::X => "x",
            AxisKind::R => "r",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub kind: AxisKind,
    pub origin: f64,
    pub spacing: f64,
    pub count: usize,
    /// Node `count` coincides with node 0 (period `count * spacing`).
    #[serde(default)]
    pub periodic: bool,
}

impl Axis {
    pub fn new(kind: AxisKind, origin: f64, spacing: f64, count: usize) -> Self {
        Axis { kind, origin, spacing, count, periodic: false }
    }

    /// Axis covering `[start, end]` with `count` nodes.
    pub fn span(kind: AxisKind, start: f64, end: f64, count: usize) -> Self {
        Axis { kind, origin: start, spacing: (end - start) / (count as f64 - 1.0), count, periodic: false }
    }

    /// Periodic axis of period `length`: nodes `start + j L / n`, `j < n`.
    pub fn periodic(kind: AxisKind, start: f64, length: f64, count: usize) -> Self {
        Axis { kind, origin: start, spacing: length / count as f64, count, periodic: true }
    }

    /// Cell-centred radial axis on `[0, r_max]`: `r_i = (i + 1/2) h`.
    pub fn radial(r_max: f64, count: usize) -> Self {
        let h = r_max / count as f64;
        Axis { kind: AxisKind::R, origin: 0.5 * h, spacing: h, count, periodic: false }
    }

    pub fn extent(&self) -> f64 {
        self.spacing * (self.count as f64 - 1.0)
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.origin + self.spacing * i as f64
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.coord(i)).collect()
    }

    /// True for a radial axis whose first node sits half a cell off `r = 0`.
    pub fn is_cell_centred_radial(&self) -> bool {
        self.kind == AxisKind::R && (self.origin - 0.5 * self.spacing).abs() < 1e-12 * self.spacing.max(1.0)
    }
}

/// Tensor-product grid over a reduced set of `{t, x, r}` axes.
/// Storage is row-major with the first axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
}

pub const MIN_POINTS: usize = 8;

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one axis".into()));
        }
        let mut seen = [false; 4];
        for a in &axes {
            if !(a.spacing > 0.0) || !a.spacing.is_finite() {
                return Err(Error::InvalidGrid(format!("axis {} spacing must be > 0", a.kind.label())));
            }
            if a.count < MIN_POINTS {
                return Err(Error::InvalidGrid(format!(
                    "axis {} has {} points, need at least {MIN_POINTS}",
                    a.kind.label(),
                    a.count
                )));
            }
            let c = a.kind.component();
            if seen[c] {
                return Err(Error::InvalidGrid("two axes map to the same component".into()));
            }
            seen[c] = true;
        }
        Ok(Grid { axes })
    }

    pub fn line(axis: Axis) -> Result<Self> {
        Grid::new(vec![axis])
    }

    pub fn spacetime(t: Axis, x: Axis) -> Result<Self> {
        Grid::new(vec![t, x])
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn ndim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axis_of_kind(&self, kind: AxisKind) -> Option<usize> {
        self.axes.iter().position(|a| a.kind == kind)
    }

    pub fn time_axis(&self) -> Option<usize> {
        self.axis_of_kind(AxisKind::T)
    }

    /// Index of the spatial (x or r) axis.
    pub fn space_axis(&self) -> Option<usize> {
        self.axes.iter().position(|a| a.kind != AxisKind::T)
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.axes[axis + 1..].iter().map(|a| a.count).product()
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        let mut k = 0;
        for (a, i) in self.axes.iter().zip(idx) {
            k = k * a.count + i;
        }
        k
    }

    pub fn multi(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (d, a) in self.axes.iter().enumerate().rev() {
            idx[d] = k % a.count;
            k /= a.count;
        }
        idx
    }

    /// Four-position of a grid point; inactive components are zero.
    pub fn position(&self, k: usize) -> [f64; 4] {
        let idx = self.multi(k);
        let mut x = [0.0; 4];
        for (a, i) in self.axes.iter().zip(idx) {
            x[a.kind.component()] = a.coord(i);
        }
        x
    }

    /// Flat index of the first element of every line along `axis`.
    pub fn line_starts(&self, axis: usize) -> Vec<usize> {
        let stride = self.stride(axis);
        let n = self.axes[axis].count;
        (0..self.len()).filter(|k| (k / stride).is_multiple_of(n)).collect()
    }

    /// Whether `k` lies at least `collar` points away from every edge.
    pub fn is_interior(&self, k: usize, collar: usize) -> bool {
        self.multi(k)
            .iter()
            .zip(&self.axes)
            .all(|(i, a)| a.periodic || (*i >= collar && *i + collar < a.count))
    }

    /// Same layout with each spacing divided by `factor` and counts scaled
    /// so the extents are preserved.
    pub fn refined(&self, factor: usize) -> Result<Grid> {
        Grid::new(
            self.axes
                .iter()
                .map(|a| Axis {
                    kind: a.kind,
                    origin: a.origin,
                    spacing: a.spacing / factor as f64,
                    count: if a.periodic { a.count * factor } else { (a.count - 1) * factor + 1 },
                    periodic: a.periodic,
                })
                .collect(),
        )
    }
}

/// Values sampled on every point of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    pub grid: Grid,
    pub values: Vec<T>,
}

pub type ScalarField = Field<f64>;

impl<T: Copy> Field<T> {
    pub fn new(grid: Grid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "field has {} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field { grid, values })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 4]) -> T) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.position(k))).collect();
        Field { grid: grid.clone(), values }
    }

    pub fn filled(grid: &Grid, v: T) -> Self {
        Field { grid: grid.clone(), values: vec![v; grid.len()] }
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field { grid: self.grid.clone(), values: self.values.iter().map(|v| f(*v)).collect() }
    }

    pub fn zip_map<U: Copy, V: Copy>(&self, other: &Field<U>, f: impl Fn(T, U) -> V) -> Field<V> {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    /// Copy of the line along `axis` starting at flat index `start`.
    pub fn line(&self, axis: usize, start: usize) -> Vec<T> {
        let stride = self.grid.stride(axis);
        (0..self.grid.axis(axis).count).map(|i| self.values[start + i * stride]).collect()
    }

    /// Apply `op` to every line along `axis` and assemble the result.
    pub fn map_lines<U: Copy + Default>(&self, axis: usize, op: impl Fn(&[T]) -> Vec<U>) -> Field<U> {
        let stride = self.grid.stride(axis);
        let mut out = vec![U::default(); self.values.len()];
        for start in self.grid.line_starts(axis) {
            let line = self.line(axis, start);
            for (i, v) in op(&line).into_iter().enumerate() {
                out[start + i * stride] = v;
            }
        }
        Field { grid: self.grid.clone(), values: out }
    }
}

impl<T> Field<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    /// Partial derivative along `axis` (coordinate derivative, lower index),
    /// second-order stencils.
    pub fn partial(&self, axis: usize) -> Result<Field<T>> {
        self.partial_with(axis, Stencil::Second)
    }

    /// Second partial derivative along `axis`, second-order stencils.
    pub fn partial2(&self, axis: usize) -> Result<Field<T>> {
        self.partial2_with(axis, Stencil::Second)
    }

    pub fn partial_with(&self, axis: usize, stencil: Stencil) -> Result<Field<T>> {
        let a = *self.grid.axis(axis);
        if a.count < 3 {
            return Err(Error::Domain("need at least 3 points for a derivative".into()));
        }
        Ok(self.map_lines(axis, |l| crate::numerics::line_d1(l, a.spacing, a.periodic, stencil)))
    }

    pub fn partial2_with(&self, axis: usize, stencil: Stencil) -> Result<Field<T>> {
        let a = *self.grid.axis(axis);
        if a.count < 4 {
            return Err(Error::Domain("need at least 4 points for a second derivative".into()));
        }
        Ok(self.map_lines(axis, |l| crate::numerics::line_d2(l, a.spacing, a.periodic, stencil)))
    }

    /// Multilinear interpolation at a four-position (inactive components are
    /// ignored). Periodic axes wrap; other axes reject points outside.
    pub fn interpolate(&self, pos: &[f64; 4]) -> Result<T> {
        let mut corners: Vec<(usize, f64)> = vec![(0, 1.0)];
        for (d, a) in self.grid.axes().iter().enumerate() {
            let stride = self.grid.stride(d);
            let x = pos[a.kind.component()];
            let (i0, i1, frac) = if a.periodic {
                let period = a.spacing * a.count as f64;
                let s = (x - a.origin).rem_euclid(period) / a.spacing;
                let i = (s.floor() as usize).min(a.count - 1);
                (i, (i + 1) % a.count, s - i as f64)
            } else {
                let (i, f) = crate::numerics::locate(a.origin, a.spacing, a.count, x).ok_or_else(|| {
                    Error::Domain(format!("{} = {x} outside the grid", a.kind.label()))
                })?;
                (i, i + 1, f)
            };
            corners = corners
                .into_iter()
                .flat_map(|(k, w)| [(k + i0 * stride, w * (1.0 - frac)), (k + i1 * stride, w * frac)])
                .collect();
        }
        Ok(corners.into_iter().fold(T::default(), |acc, (k, w)| acc + self.values[k] * w))
    }

    /// Tensor-product four-point Lagrange interpolation (cubic, O(h^4)).
    pub fn interpolate_cubic(&self, pos: &[f64; 4]) -> Result<T> {
        let mut corners: Vec<(usize, f64)> = vec![(0, 1.0)];
        for (d, a) in self.grid.axes().iter().enumerate() {
            let stride = self.grid.stride(d);
            let x = pos[a.kind.component()];
            let n = a.count as isize;
            let s = (x - a.origin) / a.spacing;
            let (start, local) = if a.periodic {
                let base = s.floor() as isize - 1;
                (base, s - base as f64)
            } else {
                if s < -1e-9 || s > (n - 1) as f64 + 1e-9 {
                    return Err(Error::Domain(format!("{} = {x} outside the grid", a.kind.label())));
                }
                let base = (s.floor() as isize - 1).clamp(0, n - 4);
                (base, s - base as f64)
            };
            let mut next = Vec::with_capacity(corners.len() * 4);
            for j in 0..4 {
                let mut w = 1.0;
                for i in 0..4 {
                    if i != j {
                        w *= (local - i as f64) / (j as f64 - i as f64);
                    }
                }
                let idx = (start + j as isize).rem_euclid(n) as usize;
                for (k, wk) in &corners {
                    next.push((k + idx * stride, wk * w));
                }
            }
            corners = next;
        }
        Ok(corners.into_iter().fold(T::default(), |acc, (k, w)| acc + self.values[k] * w))
    }

    /// Trapezoidal integral over the whole grid (fixed summation order).
    pub fn integrate(&self) -> T {
        let mut cur = self.clone();
        for d in (0..self.grid.ndim()).rev() {
            let a = self.grid.axis(d);
            let (h, n) = (a.spacing, a.count);
            let outer = cur.values.len() / n;
            let mut next = Vec::with_capacity(outer);
            for o in 0..outer {
                let line = &cur.values[o * n..(o + 1) * n];
                next.push(if a.periodic {
                    line.iter().fold(T::default(), |acc, v| acc + *v) * h
                } else {
                    crate::numerics::trapezoid(line, h)
                });
            }
            cur.values = next;
        }
        cur.values[0]
    }
}

impl ScalarField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max |value| over points at least `collar` nodes from every edge.
    pub fn interior_max_abs(&self, collar: usize) -> f64 {
        (0..self.values.len())
            .filter(|k| self.grid.is_interior(*k, collar))
            .fold(0.0, |m, k| m.max(self.values[k].abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_degenerate_axes() {
        assert!(Grid::line(Axis::new(AxisKind::X, 0.0, 0.1, 7)).is_err());
        assert!(Grid::line(Axis::new(AxisKind::X, 0.0, 0.0, 10)).is_err());
        assert!(Grid::line(Axis::new(AxisKind::X, 0.0, -1.0, 10)).is_err());
        let g = Grid::line(Axis::span(AxisKind::X, 0.0, 1.0, 11)).unwrap();
        assert!((g.axis(0).extent() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn flat_and_multi_indices_round_trip() {
        let g = Grid::spacetime(Axis::span(AxisKind::T, 0.0, 1.0, 9), Axis::span(AxisKind::X, 0.0, 2.0, 12)).unwrap();
        for k in 0..g.len() {
            assert_eq!(g.flat(&g.multi(k)), k);
        }
        let p = g.position(g.flat(&[2, 3]));
        assert!((p[0] - 0.25).abs() < 1e-15);
        assert!((p[1] - 3.0 * 2.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn integrates_polynomial() {
        let g = Grid::spacetime(Axis::span(AxisKind::T, 0.0, 1.0, 101), Axis::span(AxisKind::X, 0.0, 1.0, 101)).unwrap();
        let f = Field::from_fn(&g, |p| p[0] + p[1]);
        assert!((f.integrate() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_is_exact_for_bilinear_and_wraps_periodic_axes() {
        let g = Grid::spacetime(Axis::span(AxisKind::T, 0.0, 1.0, 9), Axis::span(AxisKind::X, -1.0, 1.0, 12)).unwrap();
        let f = Field::from_fn(&g, |p| 1.0 + 2.0 * p[0] - p[1] + 3.0 * p[0] * p[1]);
        let v = f.interpolate(&[0.37, 0.21, 0.0, 0.0]).unwrap();
        assert!((v - (1.0 + 0.74 - 0.21 + 3.0 * 0.37 * 0.21)).abs() < 1e-13);
        assert!(f.interpolate(&[0.5, 1.5, 0.0, 0.0]).is_err());
        let p = Grid::line(Axis::periodic(AxisKind::X, 0.0, 2.0, 16)).unwrap();
        let c = Field::from_fn(&p, |x| (std::f64::consts::PI * x[1]).cos());
        let a = c.interpolate(&[0.0, 0.3, 0.0, 0.0]).unwrap();
        let b = c.interpolate(&[0.0, 4.3, 0.0, 0.0]).unwrap();
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn cubic_interpolation_is_exact_for_cubics() {
        let g = Grid::spacetime(Axis::span(AxisKind::T, 0.0, 1.0, 9), Axis::periodic(AxisKind::X, 0.0, 2.0, 40)).unwrap();
        let f = Field::from_fn(&g, |p| p[0].powi(3) - 2.0 * p[0] + (std::f64::consts::PI * p[1]).sin());
        let (t, x) = (0.93, 1.97);
        let v = f.interpolate_cubic(&[t, x, 0.0, 0.0]).unwrap();
        let exact = t * t * t - 2.0 * t + (std::f64::consts::PI * x).sin();
        assert!((v - exact).abs() < 1e-5);
        assert!(f.interpolate_cubic(&[1.5, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn periodic_integral_and_derivative_are_spectrally_clean() {
        let g = Grid::line(Axis::periodic(AxisKind::X, 0.0, 2.0 * std::f64::consts::PI, 64)).unwrap();
        let f = Field::from_fn(&g, |x| 1.0 + x[1].sin());
        assert!((f.integrate() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let d = f.partial_with(0, Stencil::Fourth).unwrap();
        let err = d.values.iter().enumerate().map(|(i, v)| (v - g.axis(0).coord(i).cos()).abs()).fold(0.0, f64::max);
        assert!(err < 1e-5);
    }
}
