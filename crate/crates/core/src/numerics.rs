//! Small numerical kernels shared by the physics modules: stencils,
//! quadrature, compensated sums and log-log fits.

use std::ops::{Add, Mul, Sub};

/// Neumaier-compensated sum with a fixed (sequential) order.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Trapezoidal weights for `n` uniformly spaced samples.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n > 0 {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

/// Trapezoidal rule on uniform samples.
pub fn trapezoid<T>(values: &[T], h: f64) -> T
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T> + Default,
{
    let n = values.len();
    if n == 0 {
        return T::default();
    }
    if n == 1 {
        return T::default();
    }
    let mut acc = values[0] * 0.5 + values[n - 1] * 0.5;
    for v in &values[1..n - 1] {
        acc = acc + *v;
    }
    acc * h
}

/// First derivative at index `i` of uniformly sampled data: centred in the
/// interior, second-order one-sided at the ends.
pub fn d1<T>(f: &[T], i: usize, h: f64) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = f.len();
    debug_assert!(n >= 3);
    if i == 0 {
        ((f[1] - f[0]) * 4.0 - (f[2] - f[0])) * (0.5 / h)
    } else if i == n - 1 {
        ((f[n - 1] - f[n - 2]) * 4.0 - (f[n - 1] - f[n - 3])) * (0.5 / h)
    } else {
        (f[i + 1] - f[i - 1]) * (0.5 / h)
    }
}

/// Second derivative at index `i`: centred in the interior, second-order
/// one-sided (four points) at the ends.
pub fn d2<T>(f: &[T], i: usize, h: f64) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = f.len();
    debug_assert!(n >= 4);
    let inv = 1.0 / (h * h);
    if i == 0 {
        ((f[2] - f[0]) * 4.0 - (f[1] - f[0]) * 5.0 - (f[3] - f[0])) * inv
    } else if i == n - 1 {
        ((f[n - 3] - f[n - 1]) * 4.0 - (f[n - 2] - f[n - 1]) * 5.0 - (f[n - 4] - f[n - 1])) * inv
    } else {
        ((f[i + 1] - f[i]) - (f[i] - f[i - 1])) * inv
    }
}

/// Fourth-order centred first derivative; falls back to [`d1`] within two
/// points of either end.
pub fn d1_fourth<T>(f: &[T], i: usize, h: f64) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = f.len();
    if i < 2 || i + 2 >= n {
        return d1(f, i, h);
    }
    ((f[i - 2] - f[i + 2]) + (f[i + 1] - f[i - 1]) * 8.0) * (1.0 / (12.0 * h))
}

/// Fourth-order centred second derivative; falls back to [`d2`] near the ends.
pub fn d2_fourth<T>(f: &[T], i: usize, h: f64) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = f.len();
    if i < 2 || i + 2 >= n {
        return d2(f, i, h);
    }
    ((f[i + 1] + f[i - 1]) * 16.0 - (f[i + 2] + f[i - 2]) - f[i] * 30.0) * (1.0 / (12.0 * h * h))
}

/// Accuracy order of interior finite-difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    #[default]
    Second,
    Fourth,
}

fn wrap_line<T: Copy>(f: &[T], pad: usize) -> Vec<T> {
    let n = f.len();
    (0..n + 2 * pad).map(|j| f[(j + n - pad) % n]).collect()
}

/// First derivative of a whole line; periodic lines wrap around.
pub fn line_d1<T>(f: &[T], h: f64, periodic: bool, stencil: Stencil) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = f.len();
    let op = |g: &[T], i: usize| match stencil {
        Stencil::Second => d1(g, i, h),
        Stencil::Fourth => d1_fourth(g, i, h),
    };
    if periodic {
        let g = wrap_line(f, 2);
        (0..n).map(|i| op(&g, i + 2)).collect()
    } else {
        (0..n).map(|i| op(f, i)).collect()
    }
}

/// Second derivative of a whole line; periodic lines wrap around.
pub fn line_d2<T>(f: &[T], h: f64, periodic: bool, stencil: Stencil) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = f.len();
    let op = |g: &[T], i: usize| match stencil {
        Stencil::Second => d2(g, i, h),
        Stencil::Fourth => d2_fourth(g, i, h),
    };
    if periodic {
        let g = wrap_line(f, 2);
        (0..n).map(|i| op(&g, i + 2)).collect()
    } else {
        (0..n).map(|i| op(f, i)).collect()
    }
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn loglog_slope(h: &[f64], err: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(err)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Linear interpolation weights for coordinate `x` on a uniform axis.
/// Returns `(i, frac)` with `i + 1 < n`, or `None` outside the axis.
pub fn locate(origin: f64, h: f64, n: usize, x: f64) -> Option<(usize, f64)> {
    let s = (x - origin) / h;
    let tol = 1e-9;
    if s < -tol || s > (n - 1) as f64 + tol {
        return None;
    }
    let s = s.clamp(0.0, (n - 1) as f64);
    let i = (s.floor() as usize).min(n - 2);
    Some((i, s - i as f64))
}

/// Four-point Lagrange interpolation on uniform samples (cubic, O(h^4)).
/// Falls back to the nearest four-point window at the ends.
pub fn lagrange4<T>(f: &[T], origin: f64, h: f64, x: f64) -> Option<T>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = f.len();
    if n < 4 {
        return None;
    }
    let (i, frac) = locate(origin, h, n, x)?;
    if frac.abs() < 1e-12 {
        return Some(f[i]);
    }
    let start = i.saturating_sub(1).min(n - 4);
    let s = (x - origin) / h - start as f64;
    let mut acc: Option<T> = None;
    for k in 0..4 {
        let mut w = 1.0;
        for j in 0..4 {
            if j != k {
                w *= (s - j as f64) / (k as f64 - j as f64);
            }
        }
        let term = f[start + k] * w;
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn stencils_exact_on_quadratics() {
        let h = 0.1;
        let f: Vec<f64> = (0..10).map(|i| (i as f64 * h).powi(2)).collect();
        for i in 0..10 {
            assert!((d2(&f, i, h) - 2.0).abs() < 1e-10);
            assert!((d1(&f, i, h) - 2.0 * i as f64 * h).abs() < 1e-10);
        }
    }

    #[test]
    fn slope_of_power_law() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|h| 3.0 * h * h).collect();
        assert!((loglog_slope(&h, &e) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lagrange_exact_for_cubics() {
        let h = 0.5;
        let f: Vec<f64> = (0..8).map(|i| (i as f64 * h).powi(3)).collect();
        let v = lagrange4(&f, 0.0, h, 1.3).unwrap();
        assert!((v - 1.3f64.powi(3)).abs() < 1e-12);
        assert!(lagrange4(&f, 0.0, h, 10.0).is_none());
    }

    #[test]
    fn compensated_sum() {
        let v = vec![1e16, 1.0, -1e16, 1.0];
        assert_eq!(kahan_sum(v), 2.0);
    }
}
