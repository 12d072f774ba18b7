//! The infinitesimal Wigner-Moyal transform and momentum moments.

use num_complex::Complex64;

use super::distribution::{GaussianCarrier, PhaseSpaceDistribution, SampledCarrier};
use super::em::{gauge_factor, EMPotential};
use crate::geometry::{Axis, AxisKind, Field, FourVector, Grid};
use crate::numerics::locate;
use crate::{Error, Result};

/// Which kernel to use: `exp(i p_b dx^b / hbar)` (default) or the variant
/// `exp(i p^b dx_b / 2)` kept for auditing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelConvention {
    #[default]
    Hbar,
    PrintedHalf,
}

impl KernelConvention {
    pub fn scale(self) -> f64 {
        match self {
            KernelConvention::Hbar => 1.0,
            KernelConvention::PrintedHalf => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Gauge<'a> {
    pub potential: &'a EMPotential,
    pub charge: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct TransformOptions<'a> {
    pub convention: KernelConvention,
    pub gauge: Option<Gauge<'a>>,
    /// Accepted quadrature error estimate for sampled carriers.
    pub tolerance: f64,
}

impl Default for TransformOptions<'_> {
    fn default() -> Self {
        TransformOptions { convention: KernelConvention::Hbar, gauge: None, tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transformed {
    pub value: Complex64,
    pub error_estimate: f64,
    /// The separation exceeds the momentum-space coherence scale `hbar / sigma_p`.
    pub wide_separation: bool,
}

fn gaussian_kernel_integral(g: &GaussianCarrier, t: f64, x: f64, dt: f64, dx: f64, s: f64) -> Complex64 {
    // int N(p0) N(p1) exp(i s (p0 dt - p1 dx)) dp0 dp1
    let phase = s * (g.mean_p0 * dt - g.mean_p1 * dx);
    let damp = -0.5 * s * s * (g.sigma_p0 * g.sigma_p0 * dt * dt + g.sigma_p1 * g.sigma_p1 * dx * dx);
    Complex64::from_polar(g.marginal(t, x) * damp.exp(), phase)
}

fn sampled_integral(c: &SampledCarrier, t: f64, x: f64, dt: f64, dx: f64, s: f64) -> Result<(Complex64, f64)> {
    let g = &c.grid;
    let (ix, fx) = locate(g.x.origin, g.x.spacing, g.x.count, x)
        .ok_or_else(|| Error::Domain(format!("x = {x} outside carrier")))?;
    let (it, ft) = match g.t {
        Some(a) => locate(a.origin, a.spacing, a.count, t).ok_or_else(|| Error::Domain(format!("t = {t} outside carrier")))?,
        None => (0, 0.0),
    };
    let np = g.p.count;
    let mut line = vec![0.0; np];
    let mut add = |itt: usize, ixx: usize, w: f64| {
        if w != 0.0 {
            for (l, v) in line.iter_mut().zip(c.momentum_line(itt, ixx)) {
                *l += w * v;
            }
        }
    };
    add(it, ix, (1.0 - ft) * (1.0 - fx));
    add(it, ix + 1, (1.0 - ft) * fx);
    if g.t.is_some() {
        add(it + 1, ix, ft * (1.0 - fx));
        add(it + 1, ix + 1, ft * fx);
    }
    let h = g.p.spacing;
    let term = |j: usize| {
        let p = g.p.coord(j);
        Complex64::from_polar(line[j], s * (c.energy(p) * dt - p * dx))
    };
    let mut fine = Complex64::default();
    for j in 0..np {
        let w = if j == 0 || j == np - 1 { 0.5 } else { 1.0 };
        fine += term(j) * w;
    }
    fine *= h;
    let last_even = if np % 2 == 1 { np - 1 } else { np - 2 };
    let mut coarse = Complex64::default();
    for j in (0..=last_even).step_by(2) {
        let w = if j == 0 || j == last_even { 0.5 } else { 1.0 };
        coarse += term(j) * w;
    }
    coarse *= 2.0 * h;
    Ok((fine, (fine - coarse).norm()))
}

fn check_normalizable(c: &SampledCarrier) -> Result<()> {
    let max = c.values.iter().fold(0.0f64, |m, v| m.max(*v));
    if max == 0.0 {
        return Err(Error::Integration("carrier integrates to zero".into()));
    }
    let np = c.grid.p.count;
    let edge = c
        .values
        .chunks(np)
        .flat_map(|l| [l[0], l[np - 1]])
        .fold(0.0f64, |m, v| m.max(v));
    if edge > 1e-6 * max {
        return Err(Error::Integration(format!(
            "carrier does not decay at the momentum window edge ({:.3e} of peak)",
            edge / max
        )));
    }
    Ok(())
}

/// `rho(x + dx/2, x - dx/2) = int F(x, p) exp(i p_b dx^b) d^4p`, times the
/// gauge factor when one is supplied.
pub fn wigner_moyal_transform(
    dist: &PhaseSpaceDistribution,
    x: &FourVector,
    dx: &FourVector,
    opts: &TransformOptions,
) -> Result<Transformed> {
    dist.validate()?;
    let s = opts.convention.scale();
    let (t, xx, dt, dxx) = (x[0], x[1], dx[0], dx[1]);
    let (value, error_estimate, sigma) = match dist {
        PhaseSpaceDistribution::Gaussian(g) => {
            (gaussian_kernel_integral(g, t, xx, dt, dxx, s), 0.0, g.sigma_p1.max(g.sigma_p0))
        }
        PhaseSpaceDistribution::Mixture(gs) => (
            gs.iter().map(|g| gaussian_kernel_integral(g, t, xx, dt, dxx, s)).sum(),
            0.0,
            gs.iter().fold(0.0f64, |m, g| m.max(g.sigma_p1).max(g.sigma_p0)),
        ),
        PhaseSpaceDistribution::Sampled(c) => {
            check_normalizable(c)?;
            let (v, e) = sampled_integral(c, t, xx, dt, dxx, s)?;
            if e > opts.tolerance {
                return Err(Error::Accuracy { estimate: e, tolerance: opts.tolerance });
            }
            (v, e, c.grid.p.extent() / 6.0)
        }
    };
    let value = match opts.gauge {
        Some(gauge) => value * gauge_factor(gauge.potential, x, &(*dx * s), gauge.charge, gauge.nodes)?,
        None => value,
    };
    let wide_separation = s * dt.abs().max(dxx.abs()) * sigma > 1.0;
    Ok(Transformed { value, error_estimate, wide_separation })
}

/// Anything that can return the two-point density near the diagonal.
pub trait DensityProvider {
    /// Grid over which `d^4x` integrals are taken; its axes are the active
    /// separation directions.
    fn quadrature_grid(&self) -> &Grid;
    fn density(&self, x: &FourVector, dx: &FourVector) -> Result<Complex64>;
}

/// Density built from a phase-space carrier through the transform.
pub struct CarrierDensity<'a> {
    pub dist: &'a PhaseSpaceDistribution,
    pub opts: TransformOptions<'a>,
    grid: Grid,
}

impl<'a> CarrierDensity<'a> {
    /// Quadrature over `mean +- width sigma` with `n` nodes per axis for
    /// closed-form carriers; sampled carriers reuse their own `(t, x)` axes.
    pub fn new(dist: &'a PhaseSpaceDistribution, opts: TransformOptions<'a>, width: f64, n: usize) -> Result<Self> {
        dist.validate()?;
        let grid = match dist {
            PhaseSpaceDistribution::Sampled(c) => {
                let mut axes: Vec<Axis> = c.grid.t.iter().copied().collect();
                axes.push(Axis { kind: AxisKind::X, ..c.grid.x });
                if let Some(t) = axes.first_mut().filter(|_| c.grid.t.is_some()) {
                    t.kind = AxisKind::T;
                }
                Grid::new(axes)?
            }
            PhaseSpaceDistribution::Gaussian(g) => gaussian_window(std::slice::from_ref(g), width, n)?,
            PhaseSpaceDistribution::Mixture(gs) => gaussian_window(gs, width, n)?,
        };
        Ok(CarrierDensity { dist, opts, grid })
    }
}

fn gaussian_window(gs: &[GaussianCarrier], width: f64, n: usize) -> Result<Grid> {
    let lo = gs.iter().map(|g| g.mean_x - width * g.sigma_x).fold(f64::INFINITY, f64::min);
    let hi = gs.iter().map(|g| g.mean_x + width * g.sigma_x).fold(f64::NEG_INFINITY, f64::max);
    let mut axes = vec![];
    if gs.iter().all(|g| g.sigma_t.is_some()) {
        let tlo = gs.iter().map(|g| g.mean_t - width * g.sigma_t.unwrap()).fold(f64::INFINITY, f64::min);
        let thi = gs.iter().map(|g| g.mean_t + width * g.sigma_t.unwrap()).fold(f64::NEG_INFINITY, f64::max);
        axes.push(Axis::span(AxisKind::T, tlo, thi, n));
    } else if gs.iter().any(|g| g.sigma_t.is_some()) {
        return Err(Error::UnsupportedCarrier("mixture mixes time-localised and slice components".into()));
    }
    axes.push(Axis::span(AxisKind::X, lo, hi, n));
    Grid::new(axes)
}

impl DensityProvider for CarrierDensity<'_> {
    fn quadrature_grid(&self) -> &Grid {
        &self.grid
    }

    fn density(&self, x: &FourVector, dx: &FourVector) -> Result<Complex64> {
        Ok(wigner_moyal_transform(self.dist, x, dx, &self.opts)?.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumEstimate {
    /// Contravariant mean four-momentum `p^a`.
    pub momentum: FourVector,
    /// Imaginary residue of each component (should vanish).
    pub imaginary: FourVector,
}

/// `lim_{dx -> 0} int -i hbar d rho / d(dx_a) d^4x`, by centred differences in
/// the separation (step `spacing / 16`, one Richardson level) and trapezoidal
/// quadrature over the provider's grid.
pub fn mean_momentum_from_density(provider: &dyn DensityProvider) -> Result<MomentumEstimate> {
    let grid = provider.quadrature_grid().clone();
    let eta = crate::geometry::metric::FLAT;
    let mut momentum = FourVector::ZERO;
    let mut imaginary = FourVector::ZERO;
    let mut norm = 0.0f64;
    for a in grid.axes() {
        let c = a.kind.component();
        let h = a.spacing / 16.0;
        let mut vals = Vec::with_capacity(grid.len());
        for k in 0..grid.len() {
            let x = FourVector(grid.position(k));
            let mut e = FourVector::ZERO;
            e[c] = 1.0;
            let diff = |step: f64| -> Result<Complex64> {
                let plus = provider.density(&x, &(e * step))?;
                let minus = provider.density(&x, &(e * -step))?;
                Ok((plus - minus) / (2.0 * step))
            };
            let d_h = diff(h)?;
            let d_half = diff(0.5 * h)?;
            let d = (d_half * 4.0 - d_h) / 3.0;
            // -i d rho / d(dx^c) = p_c
            vals.push(d * Complex64::new(0.0, -1.0));
            if norm == 0.0 || c == 1 {
                norm = norm.max(provider.density(&x, &FourVector::ZERO)?.re.abs());
            }
        }
        let p_lower = Field::new(grid.clone(), vals)?.integrate();
        momentum[c] = p_lower.re / eta[c];
        imaginary[c] = p_lower.im / eta[c];
    }
    for c in 0..4 {
        let re = momentum[c].abs().max(f64::EPSILON * norm);
        if imaginary[c].abs() > 1e-6 * re {
            return Err(Error::InconsistentDensity { imag: imaginary[c], real: momentum[c] });
        }
    }
    Ok(MomentumEstimate { momentum, imaginary })
}

/// Direct phase-space moment `int p^a F d^4p d^4x`.
pub fn phase_space_moment(dist: &PhaseSpaceDistribution) -> Result<FourVector> {
    dist.validate()?;
    let gauss = |g: &GaussianCarrier| FourVector::new(g.mean_p0, g.mean_p1, 0.0, 0.0) * g.weight;
    Ok(match dist {
        PhaseSpaceDistribution::Gaussian(g) => gauss(g),
        PhaseSpaceDistribution::Mixture(gs) => gs.iter().fold(FourVector::ZERO, |acc, g| acc + gauss(g)),
        PhaseSpaceDistribution::Sampled(c) => {
            let g = &c.grid;
            let w = |i: usize, n: usize, h: f64| if i == 0 || i == n - 1 { 0.5 * h } else { h };
            let (mut p0, mut p1) = (0.0, 0.0);
            for k in 0..g.len() {
                let ip = k % g.p.count;
                let ix = (k / g.p.count) % g.x.count;
                let it = k / (g.p.count * g.x.count);
                let wt = g.t.map_or(1.0, |a| w(it, a.count, a.spacing));
                let weight = wt * w(ix, g.x.count, g.x.spacing) * w(ip, g.p.count, g.p.spacing) * c.values[k];
                let p = g.p.coord(ip);
                p0 += weight * c.energy(p);
                p1 += weight * p;
            }
            FourVector::new(p0, p1, 0.0, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::distribution::PhaseGrid;

    fn slice(p: f64, sp: f64) -> PhaseSpaceDistribution {
        PhaseSpaceDistribution::Gaussian(GaussianCarrier::slice(0.2, 0.8, p, sp, 1.0))
    }

    #[test]
    fn diagonal_is_marginal() {
        let d = slice(0.3, 0.5);
        let v = wigner_moyal_transform(&d, &FourVector::tx(0.0, 0.5), &FourVector::ZERO, &Default::default()).unwrap();
        let PhaseSpaceDistribution::Gaussian(g) = &d else { unreachable!() };
        assert_eq!(v.value.im, 0.0);
        assert!((v.value.re - g.marginal(0.0, 0.5)).abs() < 1e-15);
    }

    #[test]
    fn zero_mean_gaussian_closed_form() {
        // Oracle: int N(p; 0, s) exp(-i p d) dp = exp(-s^2 d^2 / 2)
        let sp = 0.6;
        let d = slice(0.0, sp);
        let PhaseSpaceDistribution::Gaussian(g) = &d else { unreachable!() };
        for dx in [0.0, 0.1, 0.37, 1.2] {
            let v = wigner_moyal_transform(&d, &FourVector::tx(0.0, 0.1), &FourVector::tx(0.0, dx), &Default::default())
                .unwrap()
                .value;
            let exact = g.marginal(0.0, 0.1) * (-0.5 * sp * sp * dx * dx).exp();
            assert!((v.re - exact).abs() < 1e-15 && v.im.abs() < 1e-15);
        }
    }

    #[test]
    fn shifted_mean_adds_phase() {
        let (p, sp, dx) = (0.45, 0.3, 0.25);
        let d0 = slice(0.0, sp);
        let d1 = slice(p, sp);
        let x = FourVector::tx(0.0, -0.3);
        let sep = FourVector::tx(0.0, dx);
        let v0 = wigner_moyal_transform(&d0, &x, &sep, &Default::default()).unwrap().value;
        let v1 = wigner_moyal_transform(&d1, &x, &sep, &Default::default()).unwrap().value;
        // p_1 dx^1 = -p dx
        let expected = v0 * Complex64::from_polar(1.0, -p * dx);
        assert!((v1 - expected).norm() < 1e-15);
    }

    #[test]
    fn sampled_matches_closed_form() {
        let d = slice(0.3, 0.4);
        let PhaseSpaceDistribution::Gaussian(g) = d.clone() else { unreachable!() };
        let grid = PhaseGrid::around(&g, 10.0, 201).unwrap();
        let s = PhaseSpaceDistribution::Sampled(d.sample(&grid, 1.0).unwrap());
        let x = FourVector::tx(0.0, g.mean_x);
        for dx in [0.0, 0.05, 0.3] {
            let sep = FourVector::tx(0.0, dx);
            let a = wigner_moyal_transform(&d, &x, &sep, &Default::default()).unwrap().value;
            let b = wigner_moyal_transform(&s, &x, &sep, &Default::default()).unwrap().value;
            assert!((a - b).norm() < 1e-10, "{dx}: {a} vs {b}");
        }
    }

    #[test]
    fn hermiticity() {
        let d = slice(0.7, 0.3);
        let x = FourVector::tx(0.0, 0.4);
        for dx in [0.1, 0.5] {
            let a = wigner_moyal_transform(&d, &x, &FourVector::tx(0.0, dx), &Default::default()).unwrap().value;
            let b = wigner_moyal_transform(&d, &x, &FourVector::tx(0.0, -dx), &Default::default()).unwrap().value;
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn truncated_carrier_is_rejected() {
        let g = GaussianCarrier::slice(0.0, 1.0, 0.0, 1.0, 1.0);
        let grid = PhaseGrid::around(&g, 2.0, 41).unwrap();
        let s = PhaseSpaceDistribution::Sampled(PhaseSpaceDistribution::Gaussian(g).sample(&grid, 1.0).unwrap());
        let r = wigner_moyal_transform(&s, &FourVector::tx(0.0, 0.0), &FourVector::ZERO, &Default::default());
        assert!(matches!(r, Err(Error::Integration(_))));
    }

    #[test]
    fn coarse_carrier_fails_accuracy() {
        let g = GaussianCarrier::slice(0.0, 1.0, 0.0, 0.05, 1.0);
        let grid = PhaseGrid::around(&g, 9.0, 9).unwrap();
        let s = PhaseSpaceDistribution::Sampled(PhaseSpaceDistribution::Gaussian(g).sample(&grid, 1.0).unwrap());
        let opts = TransformOptions { tolerance: 1e-12, ..Default::default() };
        let r = wigner_moyal_transform(&s, &FourVector::tx(0.0, 0.0), &FourVector::tx(0.0, 30.0), &opts);
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }

    #[test]
    fn wide_separation_is_flagged_not_failed() {
        let d = slice(0.0, 2.0);
        let v = wigner_moyal_transform(&d, &FourVector::tx(0.0, 0.0), &FourVector::tx(0.0, 1.0), &Default::default()).unwrap();
        assert!(v.wide_separation);
    }

    #[test]
    fn printed_half_kernel_halves_the_separation() {
        let d = slice(0.5, 0.4);
        let x = FourVector::tx(0.0, 0.0);
        let half = TransformOptions { convention: KernelConvention::PrintedHalf, ..Default::default() };
        let a = wigner_moyal_transform(&d, &x, &FourVector::tx(0.0, 0.6), &half).unwrap().value;
        let b = wigner_moyal_transform(&d, &x, &FourVector::tx(0.0, 0.3), &Default::default()).unwrap().value;
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn mean_momentum_zero_and_shifted() {
        let d = slice(0.0, 0.5);
        let prov = CarrierDensity::new(&d, Default::default(), 10.0, 201).unwrap();
        let est = mean_momentum_from_density(&prov).unwrap();
        assert!(est.momentum[1].abs() < 1e-8);

        let d = slice(0.3, 0.5);
        let prov = CarrierDensity::new(&d, Default::default(), 10.0, 201).unwrap();
        let est = mean_momentum_from_density(&prov).unwrap();
        let direct = phase_space_moment(&d).unwrap();
        assert!((est.momentum[1] - 0.3).abs() < 1e-6);
        assert!((est.momentum[1] - direct[1]).abs() / direct[1] < 1e-6);
    }

    #[test]
    fn narrow_carrier_recovers_mean() {
        let d = slice(0.8, 1e-4);
        let prov = CarrierDensity::new(&d, Default::default(), 10.0, 201).unwrap();
        let est = mean_momentum_from_density(&prov).unwrap();
        assert!((est.momentum[1] - 0.8).abs() < 1e-8);
    }

    #[test]
    fn energy_component_from_time_separation() {
        let g = GaussianCarrier {
            weight: 1.0,
            mean_t: 0.0,
            mean_x: 0.0,
            sigma_t: Some(1.0),
            sigma_x: 1.0,
            mean_p0: 1.3,
            mean_p1: -0.2,
            sigma_p0: 0.1,
            sigma_p1: 0.3,
        };
        let d = PhaseSpaceDistribution::Gaussian(g);
        let prov = CarrierDensity::new(&d, Default::default(), 9.0, 121).unwrap();
        let est = mean_momentum_from_density(&prov).unwrap();
        assert!((est.momentum[0] - 1.3).abs() < 1e-6);
        assert!((est.momentum[1] + 0.2).abs() < 1e-6);
    }
}
