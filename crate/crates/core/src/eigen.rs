//! Dense symmetric eigenproblems restricted to a spectral window.
//!
//! `A v = lambda B v` with `A` symmetric and `B` diagonal positive is reduced
//! to standard form with `B^{-1/2}`, solved by a full symmetric
//! decomposition and polished by shift-invert inverse iteration.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    /// Eigenvector of the original pencil, unit max-norm.
    pub vector: DVector<f64>,
    /// `|A v - lambda B v|_inf / |v|_inf`.
    pub residual: f64,
}

fn residual(a: &DMatrix<f64>, b: Option<&[f64]>, lambda: f64, v: &DVector<f64>) -> f64 {
    let mut r = a * v;
    for i in 0..v.len() {
        r[i] -= lambda * b.map_or(1.0, |b| b[i]) * v[i];
    }
    r.amax() / v.amax().max(f64::MIN_POSITIVE)
}

/// Eigenpairs with `lo <= lambda <= hi`, ascending.
pub fn symmetric_window(a: &DMatrix<f64>, b: Option<&[f64]>, lo: f64, hi: f64) -> Result<Vec<EigenPair>> {
    solve_pencil(a, b, |vals| (0..vals.len()).filter(|k| vals[*k] >= lo && vals[*k] <= hi).collect())
}

/// The `count` smallest eigenpairs, ascending.
pub fn symmetric_lowest(a: &DMatrix<f64>, b: Option<&[f64]>, count: usize) -> Result<Vec<EigenPair>> {
    solve_pencil(a, b, |vals| {
        let mut idx: Vec<usize> = (0..vals.len()).collect();
        idx.sort_by(|x, y| vals[*x].total_cmp(&vals[*y]));
        idx.truncate(count);
        idx
    })
}

fn solve_pencil(a: &DMatrix<f64>, b: Option<&[f64]>, select: impl FnOnce(&[f64]) -> Vec<usize>) -> Result<Vec<EigenPair>> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::Domain("eigenproblem needs a square, nonempty matrix".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("operator has non-finite entries".into()));
    }
    let scale: Vec<f64> = match b {
        Some(b) => {
            if b.len() != n || b.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
                return Err(Error::Domain("mass matrix must be positive".into()));
            }
            b.iter().map(|w| 1.0 / w.sqrt()).collect()
        }
        None => vec![1.0; n],
    };
    let c = DMatrix::from_fn(n, n, |i, j| {
        let v = scale[i] * a[(i, j)] * scale[j];
        let w = scale[j] * a[(j, i)] * scale[i];
        0.5 * (v + w)
    });
    let norm = c.amax().max(1.0);
    let eig = SymmetricEigen::new(c.clone());
    let mut picked: Vec<(f64, DVector<f64>)> = select(eig.eigenvalues.as_slice())
        .into_iter()
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned()))
        .collect();
    picked.sort_by(|x, y| x.0.total_cmp(&y.0));

    let tol = 1e-13 * norm;
    for (lambda, v) in picked.iter_mut() {
        if residual(&c, None, *lambda, v) <= tol {
            continue;
        }
        let shift = *lambda + 1e-10 * norm;
        let lu = (c.clone() - DMatrix::identity(n, n) * shift).lu();
        for _ in 0..2 {
            if let Some(y) = lu.solve(v) {
                *v = &y / y.norm();
            }
        }
        *lambda = v.dot(&(&c * &*v));
    }
    // Re-orthogonalise clusters of (near-)degenerate vectors.
    let cluster = 1e-8 * norm;
    for k in 1..picked.len() {
        let mut v = picked[k].1.clone();
        for j in (0..k).rev() {
            if (picked[k].0 - picked[j].0).abs() > cluster {
                break;
            }
            v -= &picked[j].1 * picked[j].1.dot(&v);
        }
        let nv = v.norm();
        if nv > 1e-6 {
            picked[k].1 = v / nv;
        }
    }

    Ok(picked
        .into_iter()
        .map(|(lambda, y)| {
            let mut x = DVector::from_fn(n, |i, _| scale[i] * y[i]);
            let m = x.amax();
            if m > 0.0 {
                x /= m;
            }
            let res = residual(a, b, lambda, &x);
            EigenPair { value: lambda, vector: x, residual: res }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_difference_spectrum() {
        let n = 60;
        let a = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let pairs = symmetric_window(&a, None, 0.0, 0.5).unwrap();
        assert!(!pairs.is_empty());
        for (k, p) in pairs.iter().enumerate() {
            let theta = (k + 1) as f64 * std::f64::consts::PI / (2.0 * (n + 1) as f64);
            assert!((p.value - 4.0 * theta.sin().powi(2)).abs() < 1e-12);
            assert!(p.residual < 1e-12);
        }
    }

    #[test]
    fn lowest_pairs_match_window() {
        let a = DMatrix::from_fn(40, 40, |i, j| match i.abs_diff(j) {
            0 => 2.0 + i as f64 * 0.01,
            1 => -1.0,
            _ => 0.0,
        });
        let all = symmetric_window(&a, None, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let low = symmetric_lowest(&a, None, 3).unwrap();
        assert_eq!(low.len(), 3);
        for (x, y) in low.iter().zip(&all) {
            assert!((x.value - y.value).abs() < 1e-13);
        }
    }

    #[test]
    fn generalized_diagonal_pencil() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let b = [2.0, 1.0];
        let pairs = symmetric_window(&a, Some(&b), -10.0, 10.0).unwrap();
        // det(A - l B) = (2 - 2l)(3 - l) - 1 = 2l^2 - 8l + 5
        let disc = (64.0f64 - 40.0).sqrt();
        assert!((pairs[0].value - (8.0 - disc) / 4.0).abs() < 1e-12);
        assert!((pairs[1].value - (8.0 + disc) / 4.0).abs() < 1e-12);
        assert!(pairs.iter().all(|p| p.residual < 1e-12));
    }

    #[test]
    fn non_positive_mass_is_rejected() {
        let a = DMatrix::identity(2, 2);
        assert!(symmetric_window(&a, Some(&[1.0, 0.0]), 0.0, 2.0).is_err());
    }
}
