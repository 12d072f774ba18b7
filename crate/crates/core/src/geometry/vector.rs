use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Contravariant four-vector `(v0, v1, v2, v3)`. Components outside the
/// active reduced dimensions stay zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    pub fn new(v0: f64, v1: f64, v2: f64, v3: f64) -> Self {
        FourVector([v0, v1, v2, v3])
    }

    /// `(t, x, 0, 0)`
    pub fn tx(t: f64, x: f64) -> Self {
        FourVector([t, x, 0.0, 0.0])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Lower the index with a diagonal metric.
    pub fn lower(&self, g: &[f64; 4]) -> Covector {
        Covector([g[0] * self.0[0], g[1] * self.0[1], g[2] * self.0[2], g[3] * self.0[3]])
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Covariant components `v_mu`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Covector(pub [f64; 4]);

impl Covector {
    /// Raise the index with a diagonal metric.
    pub fn raise(&self, g: &[f64; 4]) -> FourVector {
        FourVector([self.0[0] / g[0], self.0[1] / g[1], self.0[2] / g[2], self.0[3] / g[3]])
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for FourVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector(self.0.map(|v| v * s))
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(self.0.map(|v| -v))
    }
}
