use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::init::InitialData;
use super::potential::{PotentialConfig, Snapshot};
use super::ComplexField;
use crate::geometry::{Axis, AxisKind, Field, Grid};
use crate::{Error, Physics, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveOptions {
    pub dt: f64,
    pub steps: usize,
    /// Keep every `record_every`-th time level in the history.
    #[serde(default = "one")]
    pub record_every: usize,
}

fn one() -> usize {
    1
}

/// Output of [`evolve`].
#[derive(Debug, Clone)]
pub struct Evolution {
    /// `Psi` on a `(t, x)` grid.
    pub history: ComplexField,
    /// Discrete charge `Q_n` for `n = 0 .. steps - 1`, normalised like
    /// `int j^0 dx`; exactly conserved for static fields.
    pub charge: Vec<f64>,
}

impl Evolution {
    /// `max_n |Q_n - Q_0| / |Q_0|`.
    pub fn charge_drift(&self) -> f64 {
        let q0 = self.charge[0];
        self.charge.iter().fold(0.0f64, |m, q| m.max((q - q0).abs())) / q0.abs().max(f64::MIN_POSITIVE)
    }
}

struct Stepper<'a> {
    n: usize,
    h: f64,
    periodic: bool,
    e: f64,
    m: f64,
    s: &'a Snapshot,
}

impl Stepper<'_> {
    fn nb(&self, j: usize) -> (usize, usize) {
        let n = self.n;
        ((j + n - 1) % n, (j + 1) % n)
    }

    /// Everything on the right of `Psi_tt = ...` except `2 i e phi Psi_t`.
    fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let (h2, s, e, m) = (self.h * self.h, self.s, self.e, self.m);
        (0..self.n)
            .map(|j| {
                if !self.periodic && (j == 0 || j + 1 == self.n) {
                    return Complex64::new(0.0, 0.0);
                }
                let (l, r) = self.nb(j);
                let mut v = super::laplacian_stencil(j, self.n, self.periodic)
                    .fold(Complex64::new(0.0, 0.0), |acc, (k, w)| acc + psi[k] * w)
                    / h2;
                if e != 0.0 {
                    // i e [d_x(A Psi) + A d_x Psi] in a Hermitian form.
                    let flux = psi[r] * (s.ax[r] + s.ax[j]) - psi[l] * (s.ax[l] + s.ax[j]);
                    v += I * e * (flux / (2.0 * self.h) + psi[j] * s.phi_t[j]);
                    v += psi[j] * (e * e * (s.phi[j] * s.phi[j] - s.ax[j] * s.ax[j]));
                }
                v + psi[j] * (2.0 * m * s.w[j] - m * m)
            })
            .collect()
    }
}

/// Leapfrog integration (fourth-order Laplacian) of
/// `Psi_tt = Psi_xx + i e (d.A) Psi + 2 i e (phi Psi_t + A Psi_x)
///          + e^2 (phi^2 - A^2) Psi + 2m (W - m/2) Psi`.
///
/// Periodic axes wrap; other axes hold `Psi = 0` on the end nodes.
/// `dt` must satisfy the CFL limit `dt <= dx`.
pub fn evolve(init: &InitialData, potential: &PotentialConfig, physics: &Physics, opts: &EvolveOptions) -> Result<Evolution> {
    let x = init.x;
    let (h, n, dt) = (x.spacing, x.count, opts.dt);
    if !(physics.mass > 0.0) || !physics.mass.is_finite() {
        return Err(Error::Config("mass must be positive".into()));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Config("time step must be positive".into()));
    }
    if dt > h * (1.0 + 1e-12) {
        return Err(Error::Config(format!("CFL violated: dt = {dt} > dx = {h}")));
    }
    let rec = opts.record_every.max(1);
    let rows = opts.steps / rec + 1;
    if rows < crate::geometry::grid::MIN_POINTS {
        return Err(Error::Config(format!("only {rows} recorded time levels, need at least {}", crate::geometry::grid::MIN_POINTS)));
    }
    let (m, e) = (physics.mass, physics.charge);
    let xs = x.coords();
    let mut snap = potential.snapshot(init.t0, &xs)?;
    let dynamic = !potential.is_static();

    let mut cur = init.psi.clone();
    let mut dpsi = init.dpsi.clone();
    if !x.periodic {
        for v in [&mut cur, &mut dpsi] {
            v[0] = Complex64::new(0.0, 0.0);
            v[n - 1] = Complex64::new(0.0, 0.0);
        }
    }

    // Start consistent with the leapfrog dispersion: for L = -lambda the
    // exact first step is cos(theta) psi + dt sqrt(1 - dt^2 lambda / 4) psi_t.
    let st = Stepper { n, h, periodic: x.periodic, e, m, s: &snap };
    let l0 = st.apply(&cur);
    let acc: Vec<Complex64> = (0..n).map(|j| l0[j] + I * (2.0 * e * snap.phi[j]) * dpsi[j]).collect();
    let l1 = st.apply(&dpsi);
    let dt3 = dt * dt * dt;
    let mut next: Vec<Complex64> = (0..n)
        .map(|j| {
            let jerk = l1[j] * (dt3 / 8.0) + I * (2.0 * e * snap.phi[j]) * acc[j] * (dt3 / 6.0);
            cur[j] + dpsi[j] * dt + acc[j] * (0.5 * dt * dt) + jerk
        })
        .collect();
    let mut prev;

    let mut values = Vec::with_capacity(rows * n);
    values.extend_from_slice(&cur);
    let mut charge = Vec::with_capacity(opts.steps);
    let charge_of = |a: &[Complex64], b: &[Complex64], phi: &[f64]| -> f64 {
        let s = crate::numerics::kahan_sum(
            (0..n).map(|j| {
                let z = a[j].conj() * b[j];
                z.im / dt - e * phi[j] * z.re
            }),
        );
        -h * s / m
    };

    for step in 1..=opts.steps {
        charge.push(charge_of(&cur, &next, &snap.phi));
        prev = std::mem::replace(&mut cur, next);
        if step % rec == 0 {
            values.extend_from_slice(&cur);
        }
        if step == opts.steps {
            break;
        }
        if dynamic {
            snap = potential.snapshot(init.t0 + step as f64 * dt, &xs)?;
        }
        let st = Stepper { n, h, periodic: x.periodic, e, m, s: &snap };
        let l = st.apply(&cur);
        let inv_dt2 = 1.0 / (dt * dt);
        next = (0..n)
            .map(|j| {
                let iephi = I * (e * snap.phi[j]);
                let rhs = l[j] + (cur[j] * 2.0 - prev[j]) * inv_dt2 - iephi * prev[j] / dt;
                rhs / (inv_dt2 - iephi / dt)
            })
            .collect();
        if !x.periodic {
            next[0] = Complex64::new(0.0, 0.0);
            next[n - 1] = Complex64::new(0.0, 0.0);
        }
        if next.iter().any(|z| !z.is_finite() || z.norm_sqr() > 1e300) {
            return Err(Error::Instability { step: step + 1 });
        }
    }

    let t_axis = Axis::new(AxisKind::T, init.t0, dt * rec as f64, rows);
    let grid = Grid::spacetime(t_axis, x)?;
    Ok(Evolution { history: Field::new(grid, values)?, charge })
}
