use std::f64::consts::PI;

use num_complex::Complex64;

use crate::field::ComplexField;
use crate::geometry::{Field, Grid, ScalarField};
use crate::{Error, Result};

/// Default node threshold relative to `max R`.
pub const NODE_FRACTION: f64 = 1e-8;

/// `Psi = R exp(iS)` on a grid, with nodes (`R < eps_node`) flagged.
#[derive(Debug, Clone)]
pub struct MadelungPair {
    pub r: ScalarField,
    pub s: ScalarField,
    pub node: Vec<bool>,
    pub eps_node: f64,
}

impl MadelungPair {
    pub fn grid(&self) -> &Grid {
        &self.r.grid
    }
}

/// Real field with points that could not be evaluated masked out.
#[derive(Debug, Clone)]
pub struct MaskedField {
    pub field: ScalarField,
    pub valid: Vec<bool>,
}

impl MaskedField {
    pub fn all_valid(field: ScalarField) -> Self {
        let valid = vec![true; field.values.len()];
        MaskedField { field, valid }
    }

    pub fn masked_count(&self) -> usize {
        self.valid.iter().filter(|v| !**v).count()
    }

    /// Max |value| over valid points accepted by `keep`.
    pub fn max_abs_where(&self, keep: impl Fn(usize) -> bool) -> f64 {
        (0..self.valid.len())
            .filter(|k| self.valid[*k] && keep(*k))
            .fold(0.0, |m, k| m.max(self.field.values[k].abs()))
    }

    /// Max |value| over valid points at least `collar` nodes from non-periodic edges.
    pub fn interior_max_abs(&self, collar: usize) -> f64 {
        self.max_abs_where(|k| self.field.grid.is_interior(k, collar))
    }
}

/// `NODE_FRACTION * max |Psi|`.
pub fn node_threshold(psi: &ComplexField) -> f64 {
    NODE_FRACTION * psi.values.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

fn wrap(d: f64) -> f64 {
    d - 2.0 * PI * (d / (2.0 * PI)).round()
}

/// Unwrap `theta` along one row, bridging nodes, then fill nodes linearly.
fn unwrap_row(theta: &[f64], node: &[bool]) -> Option<Vec<f64>> {
    let n = theta.len();
    let live: Vec<usize> = (0..n).filter(|j| !node[*j]).collect();
    let first = *live.first()?;
    let mut s = vec![0.0; n];
    s[first] = theta[first];
    for w in live.windows(2) {
        s[w[1]] = s[w[0]] + wrap(theta[w[1]] - theta[w[0]]);
    }
    fill_nodes(&mut s, &live);
    Some(s)
}

fn fill_nodes(s: &mut [f64], live: &[usize]) {
    let n = s.len();
    let (first, last) = (live[0], live[live.len() - 1]);
    for j in 0..first {
        s[j] = s[first];
    }
    for j in last + 1..n {
        s[j] = s[last];
    }
    for w in live.windows(2) {
        let (a, b) = (w[0], w[1]);
        for j in a + 1..b {
            let f = (j - a) as f64 / (b - a) as f64;
            s[j] = s[a] * (1.0 - f) + s[b] * f;
        }
    }
}

/// `R = |Psi|`, `S = arg Psi` unwrapped row by row along the fastest axis
/// (`x`), rows aligned in `t` by multiples of `2 pi` at the strongest common
/// point. `S` is linearly interpolated across nodes.
pub fn decompose(psi: &ComplexField, eps_node: f64) -> Result<MadelungPair> {
    if psi.values.iter().any(|z| !z.is_finite()) {
        return Err(Error::Domain("amplitude must be finite".into()));
    }
    let g = &psi.grid;
    let r: Vec<f64> = psi.values.iter().map(|z| z.norm()).collect();
    let node: Vec<bool> = r.iter().map(|v| *v < eps_node).collect();
    if node.iter().all(|n| *n) {
        return Err(Error::DegenerateField(eps_node));
    }
    let theta: Vec<f64> = psi.values.iter().map(|z| z.arg()).collect();
    let nx = g.axis(g.ndim() - 1).count;
    let rows = g.len() / nx;
    let mut s = vec![0.0; g.len()];
    let mut prev: Option<usize> = None;
    let mut dead_rows = Vec::new();
    for row in 0..rows {
        let span = row * nx..(row + 1) * nx;
        let Some(mut line) = unwrap_row(&theta[span.clone()], &node[span.clone()]) else {
            dead_rows.push(row);
            continue;
        };
        if let Some(p) = prev {
            let best = (0..nx)
                .filter(|j| !node[row * nx + j] && !node[p * nx + j])
                .max_by(|a, b| r[row * nx + a].total_cmp(&r[row * nx + b]))
                .unwrap_or_else(|| (0..nx).find(|j| !node[row * nx + j]).unwrap());
            let shift = 2.0 * PI * ((s[p * nx + best] - line[best]) / (2.0 * PI)).round();
            line.iter_mut().for_each(|v| *v += shift);
        }
        s[span].copy_from_slice(&line);
        prev = Some(row);
    }
    // Rows made only of nodes take the nearest live row.
    let live_rows: Vec<usize> = (0..rows).filter(|r| !dead_rows.contains(r)).collect();
    for row in dead_rows {
        let src = *live_rows.iter().min_by_key(|l| l.abs_diff(row)).unwrap();
        let (a, b) = (src * nx, row * nx);
        for j in 0..nx {
            s[b + j] = s[a + j];
        }
    }
    Ok(MadelungPair {
        r: Field::new(g.clone(), r)?,
        s: Field::new(g.clone(), s)?,
        node,
        eps_node,
    })
}

/// `R exp(iS)`.
pub fn recompose(mp: &MadelungPair) -> ComplexField {
    mp.r.zip_map(&mp.s, Complex64::from_polar)
}
