use serde::Serialize;

use super::covariant::covariant_stationary_solve;
use super::stress::{matter_tensor, StressTensor};
use super::weak_field::solve_metric_weak_field;
use super::GravityConfig;
use crate::field::PotentialConfig;
use crate::geometry::MetricField;
use crate::io::Column;
use crate::madelung::{continuity_residual, MadelungPair};
use crate::{Error, Physics, Result};

/// One pass of the fixed-point loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub energy: f64,
    /// `max |Phi[T(R)] - Phi|`: how far the current metric is from the one
    /// its own source produces.
    pub field_residual: f64,
    /// Largest Hamilton-Jacobi residual of the state in the current metric.
    pub quantum_residual: f64,
    /// `max |Delta Phi|` actually applied after this pass.
    pub metric_change: f64,
}

#[derive(Debug, Clone)]
pub struct CoupledSolution {
    /// Statistical metric at the fixed point.
    pub metric: MetricField,
    pub phi: Vec<f64>,
    pub pair: MadelungPair,
    pub energy: f64,
    pub trace: Vec<IterationRecord>,
    /// False when the iteration limit was hit first; the fields then hold
    /// the last iterate.
    pub converged: bool,
    /// Largest continuity residual of the final state.
    pub continuity_residual: f64,
}

impl CoupledSolution {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn last(&self) -> &IterationRecord {
        self.trace.last().expect("trace holds at least one pass")
    }

    pub fn trace_columns(&self) -> Vec<Column> {
        let col = |name: &str, unit: &str, f: &dyn Fn(&IterationRecord) -> f64| Column::new(name, unit, self.trace.iter().map(f).collect());
        vec![
            col("iteration", "1", &|r| r.iteration as f64),
            col("E", "m", &|r| r.energy),
            col("max_dPhi", "1", &|r| r.metric_change),
            col("field_residual", "1", &|r| r.field_residual),
            col("quantum_residual", "m", &|r| r.quantum_residual),
        ]
    }

    pub fn profile_columns(&self) -> Vec<Column> {
        let g = &self.metric;
        vec![
            Column::new("r", "1/m", g.grid.axis(0).coords()),
            Column::new("R", "m^(3/2)", self.pair.r.values.clone()),
            Column::new("Phi", "1", self.phi.clone()),
            Column::new("g00", "1", g.components.iter().map(|c| c[0]).collect()),
            Column::new("g_rr", "1", g.components.iter().map(|c| c[1]).collect()),
        ]
    }
}

/// Self-consistent static state: starting from flat space, alternately
/// source the weak-field metric with `T_(Q) + T_(M)` and re-solve the ground
/// state in that metric, until the metric reproduces itself to
/// `cfg.tolerance`. Three consecutive growths of the field residual abort
/// with [`Error::NonConvergence`].
pub fn coupled_solve(cfg: &GravityConfig) -> Result<CoupledSolution> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let n = grid.len();
    let matter = StressTensor::dust(&grid, &cfg.matter.density(grid.axis(0)))?;
    let v = vec![0.0; n];
    let mut phi = vec![0.0; n];
    let mut metric = MetricField::flat(&grid);
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut growths = 0;
    for iteration in 1..=cfg.max_iterations {
        let spectrum = covariant_stationary_solve(&metric, &v, cfg.mass, 1)?;
        let Some(state) = spectrum.states.into_iter().next() else {
            return Err(Error::NonConvergence {
                iterations: iteration,
                reason: spectrum.diagnostic.unwrap_or_else(|| "no ground state".into()),
                trace: trace.iter().map(|r| format!("{r:?}")).collect(),
            });
        };
        let tq = matter_tensor(&state.pair, &metric, cfg.mass, state.energy)?;
        let field = match solve_metric_weak_field(&tq.frame.add(&matter)?, cfg) {
            Ok(f) => f,
            Err(Error::Domain(reason)) => {
                return Err(Error::NonConvergence { iterations: iteration, reason, trace: trace.iter().map(|r| format!("{r:?}")).collect() })
            }
            Err(e) => return Err(e),
        };
        let field_residual = field.phi.iter().zip(&phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let done = field_residual <= cfg.tolerance;
        let metric_change = if done { 0.0 } else { cfg.relaxation * field_residual };
        trace.push(IterationRecord { iteration, energy: state.energy, field_residual, quantum_residual: state.residual, metric_change });
        let growing = trace.len() >= 2 && field_residual > trace[trace.len() - 2].field_residual;
        growths = if growing { growths + 1 } else { 0 };
        if growths >= 3 {
            return Err(Error::NonConvergence {
                iterations: iteration,
                reason: format!("field residual grew three passes in a row (now {field_residual:.3e})"),
                trace: trace.iter().map(|r| format!("{r:?}")).collect(),
            });
        }
        if done || iteration == cfg.max_iterations {
            let physics = Physics { mass: cfg.mass, charge: 0.0, newton_g: cfg.newton_g };
            let continuity = continuity_residual(&state.pair, &metric, &physics, &PotentialConfig::free())?.field.max_abs();
            return Ok(CoupledSolution {
                metric,
                phi,
                pair: state.pair,
                energy: state.energy,
                trace,
                converged: done,
                continuity_residual: continuity,
            });
        }
        for (p, target) in phi.iter_mut().zip(&field.phi) {
            *p += cfg.relaxation * (target - *p);
        }
        metric = MetricField::weak_field(&grid, &phi)?;
    }
    unreachable!("loop returns on its last pass")
}
