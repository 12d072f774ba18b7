use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::EnergyBranch;
use crate::geometry::{Axis, AxisKind, Field, Grid, ScalarField};
use crate::io::{column, read_columns, Column};
use crate::{Error, Result};

/// Cauchy data `(Psi, d_t Psi)` at the initial time on a spatial axis.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub x: Axis,
    pub t0: f64,
    pub psi: Vec<Complex64>,
    pub dpsi: Vec<Complex64>,
}

impl InitialData {
    pub fn new(x: Axis, psi: Vec<Complex64>, dpsi: Vec<Complex64>) -> Result<Self> {
        if psi.len() != x.count || dpsi.len() != x.count {
            return Err(Error::Config("initial data length does not match the axis".into()));
        }
        if psi.iter().chain(&dpsi).any(|z| !z.is_finite()) {
            return Err(Error::Config("initial data must be finite".into()));
        }
        Ok(InitialData { x, t0: 0.0, psi, dpsi })
    }

    pub fn to_columns(&self) -> Vec<Column> {
        vec![
            Column::new("x", "1/m", self.x.coords()),
            Column::new("re_psi", "1", self.psi.iter().map(|z| z.re).collect()),
            Column::new("im_psi", "1", self.psi.iter().map(|z| z.im).collect()),
            Column::new("re_dpsi", "m", self.dpsi.iter().map(|z| z.re).collect()),
            Column::new("im_dpsi", "m", self.dpsi.iter().map(|z| z.im).collect()),
        ]
    }

    /// Read `x re_psi im_psi [re_dpsi im_dpsi]`. Without time derivatives the
    /// requested energy branch is projected out of `psi`. `x` must be uniform.
    pub fn load(path: &Path, mass: f64, branch: EnergyBranch, periodic: bool) -> Result<Self> {
        let cols = read_columns(path)?;
        let x = &column(&cols, "x")?.values;
        if x.len() < 8 {
            return Err(Error::Config("initial data needs at least 8 rows".into()));
        }
        let h = x[1] - x[0];
        if !(h > 0.0) || x.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
            return Err(Error::Config("x column must be uniform and increasing".into()));
        }
        let axis = if periodic {
            Axis::periodic(AxisKind::X, x[0], h * x.len() as f64, x.len())
        } else {
            Axis::new(AxisKind::X, x[0], h, x.len())
        };
        let zip = |re: &str, im: &str| -> Result<Vec<Complex64>> {
            let (a, b) = (column(&cols, re)?, column(&cols, im)?);
            Ok(a.values.iter().zip(&b.values).map(|(r, i)| Complex64::new(*r, *i)).collect())
        };
        let psi = zip("re_psi", "im_psi")?;
        let dpsi = match zip("re_dpsi", "im_dpsi") {
            Ok(d) => d,
            Err(_) => project_branch(&axis, &psi, mass, branch),
        };
        InitialData::new(axis, psi, dpsi)
    }
}

fn sign(branch: EnergyBranch) -> f64 {
    match branch {
        EnergyBranch::Positive => 1.0,
        EnergyBranch::Negative => -1.0,
    }
}

/// `Psi = exp(i p x)` with `d_t Psi = -+ i E Psi`, `E = sqrt(m^2 + p^2)`.
pub fn plane_wave(x: Axis, p: f64, mass: f64, branch: EnergyBranch) -> Result<InitialData> {
    let e = sign(branch) * (mass * mass + p * p).sqrt();
    let psi: Vec<Complex64> = x.coords().iter().map(|x| Complex64::from_polar(1.0, p * x)).collect();
    let dpsi = psi.iter().map(|z| Complex64::new(0.0, -e) * z).collect();
    InitialData::new(x, psi, dpsi)
}

/// Exact free plane wave `exp(i(p x - E t))` sampled on a `(t, x)` grid.
pub fn plane_wave_field(grid: &Grid, p: f64, mass: f64, branch: EnergyBranch) -> Field<Complex64> {
    let e = sign(branch) * (mass * mass + p * p).sqrt();
    Field::from_fn(grid, |q| Complex64::from_polar(1.0, p * q[1] - e * q[0]))
}

/// Time derivative of the free single-branch solution through `psi`: each
/// Fourier mode gets `d_t = -+ i sqrt(m^2 + k^2)`. The axis is treated as
/// periodic with period `count * spacing`.
pub fn project_branch(x: &Axis, psi: &[Complex64], mass: f64, branch: EnergyBranch) -> Vec<Complex64> {
    let n = psi.len();
    let mut planner = FftPlanner::new();
    let mut buf = psi.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    let period = x.spacing * n as f64;
    for (j, z) in buf.iter_mut().enumerate() {
        let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        let k = 2.0 * PI * m / period;
        let omega = sign(branch) * (mass * mass + k * k).sqrt();
        *z *= Complex64::new(0.0, -omega / n as f64);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Gaussian packet `exp(-(x - x0)^2 / (4 sigma^2) + i p0 x)` (so `|Psi|^2`
/// has width `sigma`) on a single energy branch.
pub fn gaussian_packet(x: Axis, x0: f64, sigma: f64, p0: f64, mass: f64, branch: EnergyBranch) -> Result<InitialData> {
    if !(sigma > 0.0) {
        return Err(Error::Config("packet width must be > 0".into()));
    }
    let psi: Vec<Complex64> = x
        .coords()
        .iter()
        .map(|x| Complex64::from_polar((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), p0 * x))
        .collect();
    let dpsi = project_branch(&x, &psi, mass, branch);
    InitialData::new(x, psi, dpsi)
}

/// Square well: `V = depth` for `|x - center| < width / 2`, zero outside.
/// Positive depth is attractive (it lowers `E^2`).
pub fn square_well(x: Axis, center: f64, width: f64, depth: f64) -> Result<ScalarField> {
    let grid = Grid::line(x)?;
    Ok(Field::from_fn(&grid, |p| if (p[1] - center).abs() < 0.5 * width { depth } else { 0.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_reproduces_plane_wave_derivative() {
        let x = Axis::periodic(AxisKind::X, 0.0, 10.0, 64);
        let p = 2.0 * PI * 3.0 / 10.0;
        let pw = plane_wave(x, p, 1.3, EnergyBranch::Positive).unwrap();
        let d = project_branch(&x, &pw.psi, 1.3, EnergyBranch::Positive);
        for (a, b) in d.iter().zip(&pw.dpsi) {
            assert!((a - b).norm() < 1e-12);
        }
        let neg = project_branch(&x, &pw.psi, 1.3, EnergyBranch::Negative);
        assert!((neg[5] + pw.dpsi[5]).norm() < 1e-12);
    }

    #[test]
    fn packet_and_file_round_trip() {
        let x = Axis::periodic(AxisKind::X, -10.0, 20.0, 128);
        let g = gaussian_packet(x, 0.0, 1.0, 0.5, 1.0, EnergyBranch::Positive).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("init.dat");
        crate::io::write_columns(&path, &g.to_columns()).unwrap();
        let back = InitialData::load(&path, 1.0, EnergyBranch::Positive, true).unwrap();
        assert_eq!(back.psi, g.psi);
        assert!((back.x.spacing - x.spacing).abs() < 1e-12);
        // Without derivative columns the branch is projected again.
        let cols: Vec<_> = g.to_columns().into_iter().take(3).collect();
        crate::io::write_columns(&path, &cols).unwrap();
        let proj = InitialData::load(&path, 1.0, EnergyBranch::Positive, true).unwrap();
        for (a, b) in proj.dpsi.iter().zip(&g.dpsi) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn well_is_a_box() {
        let v = square_well(Axis::span(AxisKind::X, -2.0, 2.0, 41), 0.0, 1.0, 0.3).unwrap();
        assert_eq!(v.values[20], 0.3);
        assert_eq!(v.values[0], 0.0);
    }
}
