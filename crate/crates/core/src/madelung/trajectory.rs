use serde::{Deserialize, Serialize};

use super::pair::MadelungPair;
use super::potential::{effective_potential, phase_gradient};
use crate::field::PotentialConfig;
use crate::geometry::{Field, FourVector, MetricField, ScalarField};
use crate::io::Column;
use crate::{Error, Physics, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryState {
    pub tau: f64,
    pub x: FourVector,
    pub p: FourVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryOptions {
    pub tau_span: f64,
    pub dtau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryStop {
    Completed,
    ExitedGrid,
    NodeCrossing,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<TrajectoryState>,
    pub stop: TrajectoryStop,
}

impl Trajectory {
    pub fn to_columns(&self) -> Vec<Column> {
        let col = |name: &str, unit: &str, f: &dyn Fn(&TrajectoryState) -> f64| Column::new(name, unit, self.states.iter().map(f).collect());
        vec![
            col("tau", "1/m", &|s| s.tau),
            col("t", "1/m", &|s| s.x[0]),
            col("x", "1/m", &|s| s.x[1]),
            col("p0", "m", &|s| s.p[0]),
            col("p1", "m", &|s| s.p[1]),
        ]
    }
}

/// Sampled guidance fields: `-d^a V_eff`, `-d^a S` and `R`, interpolated
/// bilinearly along the path.
pub struct Guidance {
    force: Vec<(usize, ScalarField)>,
    momentum: Vec<(usize, ScalarField)>,
    r: ScalarField,
    node_valid: ScalarField,
    eps_node: f64,
    mass: f64,
}

impl Guidance {
    pub fn new(mp: &MadelungPair, potential: &PotentialConfig, g: &MetricField, physics: &Physics) -> Result<Self> {
        let veff = effective_potential(mp, potential, g, physics.mass)?;
        let grid = mp.grid().clone();
        let ds = phase_gradient(mp)?;
        let mut force = Vec::new();
        let mut momentum = Vec::new();
        for (axis, a) in grid.axes().iter().enumerate() {
            let c = a.kind.component();
            let dv = veff.field.partial(axis)?;
            let up = |k: usize, v: f64| -> Result<f64> { Ok(v * g.inverse_at(k)?[c]) };
            let fv = (0..grid.len()).map(|k| up(k, -dv.values[k])).collect::<Result<_>>()?;
            let pv = (0..grid.len()).map(|k| up(k, -ds.values[k][c])).collect::<Result<_>>()?;
            force.push((c, Field::new(grid.clone(), fv)?));
            momentum.push((c, Field::new(grid.clone(), pv)?));
        }
        let node_valid = Field::new(grid, veff.valid.iter().map(|v| if *v { 1.0 } else { 0.0 }).collect())?;
        Ok(Guidance { force, momentum, r: mp.r.clone(), node_valid, eps_node: mp.eps_node, mass: physics.mass })
    }

    fn sample(fields: &[(usize, ScalarField)], x: &FourVector) -> Result<FourVector> {
        let mut out = FourVector::ZERO;
        for (c, f) in fields {
            out[*c] = f.interpolate(&x.0)?;
        }
        Ok(out)
    }

    /// `p^a = -d^a S` at `x`.
    pub fn momentum_at(&self, x: &FourVector) -> Result<FourVector> {
        Self::sample(&self.momentum, x)
    }

    pub fn force_at(&self, x: &FourVector) -> Result<FourVector> {
        Self::sample(&self.force, x)
    }

    fn near_node(&self, x: &FourVector) -> Result<bool> {
        Ok(self.r.interpolate(&x.0)? < self.eps_node || self.node_valid.interpolate(&x.0)? < 1.0 - 1e-12)
    }
}

/// RK4 for `dx^a/dtau = p^a / m`, `dp^a/dtau = -d^a V_eff`, starting from
/// `p^a = -d^a S(x0)`. Stops early when the path leaves the grid or enters a
/// node region.
pub fn integrate_trajectory(
    x0: FourVector,
    mp: &MadelungPair,
    potential: &PotentialConfig,
    g: &MetricField,
    physics: &Physics,
    opts: &TrajectoryOptions,
) -> Result<Trajectory> {
    if !(opts.dtau > 0.0) || !(opts.tau_span >= 0.0) {
        return Err(Error::Config("trajectory needs dtau > 0 and tau_span >= 0".into()));
    }
    let guide = Guidance::new(mp, potential, g, physics)?;
    if guide.near_node(&x0)? {
        return Err(Error::Domain("trajectory seed sits in a node region".into()));
    }
    let m = guide.mass;
    let mut state = TrajectoryState { tau: 0.0, x: x0, p: guide.momentum_at(&x0)? };
    let mut states = vec![state];
    let steps = (opts.tau_span / opts.dtau).round() as usize;
    let rhs = |x: &FourVector, p: &FourVector| -> Result<(FourVector, FourVector)> { Ok((*p * (1.0 / m), guide.force_at(x)?)) };
    for _ in 0..steps {
        let h = opts.dtau;
        let step = || -> Result<(FourVector, FourVector)> {
            let (k1x, k1p) = rhs(&state.x, &state.p)?;
            let (k2x, k2p) = rhs(&(state.x + k1x * (0.5 * h)), &(state.p + k1p * (0.5 * h)))?;
            let (k3x, k3p) = rhs(&(state.x + k2x * (0.5 * h)), &(state.p + k2p * (0.5 * h)))?;
            let (k4x, k4p) = rhs(&(state.x + k3x * h), &(state.p + k3p * h))?;
            let x = state.x + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
            let p = state.p + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0);
            Ok((x, p))
        };
        let (x, p) = match step() {
            Ok(v) => v,
            Err(Error::Domain(_)) => return Ok(Trajectory { states, stop: TrajectoryStop::ExitedGrid }),
            Err(e) => return Err(e),
        };
        if !x.is_finite() || !p.is_finite() {
            return Err(Error::Integration("trajectory became non-finite".into()));
        }
        match guide.near_node(&x) {
            Ok(false) => {}
            Ok(true) => return Ok(Trajectory { states, stop: TrajectoryStop::NodeCrossing }),
            Err(Error::Domain(_)) => return Ok(Trajectory { states, stop: TrajectoryStop::ExitedGrid }),
            Err(e) => return Err(e),
        }
        state = TrajectoryState { tau: state.tau + h, x, p };
        states.push(state);
    }
    Ok(Trajectory { states, stop: TrajectoryStop::Completed })
}
