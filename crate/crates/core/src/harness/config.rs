use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::field::EnergyBranch;
use crate::geometry::{Axis, AxisKind};
use crate::gravity::GravityConfig;
use crate::{Error, Physics, Result};

/// Everything a run needs, read from one TOML file. Unknown keys are
/// rejected; every section except `[physics]` has defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_name")]
    pub name: String,
    /// Seed for the randomised suites; `--seed` overrides it.
    #[serde(default)]
    pub seed: u64,
    /// Output directory; `--out` overrides it.
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default = "yes")]
    pub plots: bool,
    pub physics: Physics,
    #[serde(default)]
    pub packet: PacketConfig,
    #[serde(default)]
    pub stationary: StationaryConfig,
    #[serde(default)]
    pub transform: TransformConfig,
    #[serde(default)]
    pub trajectories: TrajectoryConfig,
    #[serde(default)]
    pub gravity: GravityConfig,
}

fn default_name() -> String {
    "run".into()
}

fn yes() -> bool {
    true
}

/// Gaussian packet on a periodic line, evolved from `t = 0` to `t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PacketConfig {
    pub x_min: f64,
    pub length: f64,
    /// Points on the coarsest refinement level.
    pub points: usize,
    pub x0: f64,
    pub sigma: f64,
    pub p0: f64,
    pub branch: EnergyBranch,
    pub t_end: f64,
    /// `dt / dx`.
    pub courant: f64,
    /// Refinement levels for convergence studies; `--levels` overrides it.
    pub levels: usize,
    /// Separation used by the density-equation residual.
    pub separation: f64,
}

impl Default for PacketConfig {
    fn default() -> Self {
        PacketConfig {
            x_min: -10.0,
            length: 20.0,
            points: 100,
            x0: 0.0,
            sigma: 1.0,
            p0: 0.8,
            branch: EnergyBranch::Positive,
            t_end: 1.0,
            courant: 0.5,
            levels: 4,
            separation: 0.8,
        }
    }
}

impl PacketConfig {
    pub fn axis(&self, refine: usize) -> Axis {
        Axis::periodic(AxisKind::X, self.x_min, self.length, self.points << refine)
    }
}

/// Free-particle stationary spectrum in a box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StationaryConfig {
    pub length: f64,
    pub points: usize,
    pub periodic: bool,
    pub e_min: f64,
    pub e_max: f64,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        StationaryConfig { length: 10.0, points: 64, periodic: true, e_min: 0.0, e_max: 2.0 }
    }
}

impl StationaryConfig {
    pub fn axis(&self) -> Axis {
        if self.periodic {
            Axis::periodic(AxisKind::X, 0.0, self.length, self.points)
        } else {
            Axis::span(AxisKind::X, 0.0, self.length, self.points)
        }
    }
}

/// Random carrier suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransformConfig {
    pub mixtures: usize,
    pub max_components: usize,
    /// Every `sampled_every`-th mixture is also sampled on a phase grid.
    pub sampled_every: usize,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig { mixtures: 1000, max_components: 4, sampled_every: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectoryConfig {
    pub tau_span: f64,
    pub dtau: f64,
    pub seed_t: f64,
    pub seed_x: f64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        TrajectoryConfig { tau_span: 2.0, dtau: 0.01, seed_t: 0.2, seed_x: 4.0 }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Ok((RunConfig::parse(&text)?, text))
    }

    /// Built-in configuration, identical to the shipped `configs/default.toml`.
    pub fn builtin() -> Self {
        RunConfig::parse(DEFAULT_TOML).expect("built-in configuration parses")
    }

    /// Gravity parameters with the mass and coupling taken from `[physics]`.
    pub fn gravity_config(&self) -> GravityConfig {
        GravityConfig { mass: self.physics.mass, newton_g: self.physics.newton_g, ..self.gravity }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.physics.mass > 0.0) {
            return bad("physics.mass must be positive".into());
        }
        if !(self.physics.newton_g >= 0.0) {
            return bad("physics.newton_g must be >= 0".into());
        }
        let p = &self.packet;
        if !(p.length > 0.0 && p.sigma > 0.0 && p.t_end > 0.0) {
            return bad("packet.length, packet.sigma and packet.t_end must be positive".into());
        }
        if !(p.courant > 0.0 && p.courant <= 1.0) {
            return bad("packet.courant must lie in (0, 1]".into());
        }
        if p.levels < 2 {
            return bad("packet.levels must be at least 2".into());
        }
        let h = p.length / p.points as f64;
        let half = 0.5 * p.separation / h;
        if p.separation <= 0.0 || (half - half.round()).abs() > 1e-9 {
            return bad(format!("packet.separation / 2 must be a positive multiple of the coarse spacing {h}"));
        }
        let s = &self.stationary;
        if !(s.length > 0.0 && s.e_min <= s.e_max) {
            return bad("stationary.length must be positive and e_min <= e_max".into());
        }
        if self.transform.max_components == 0 || self.transform.sampled_every == 0 {
            return bad("transform.max_components and transform.sampled_every must be >= 1".into());
        }
        if !(self.trajectories.dtau > 0.0 && self.trajectories.tau_span > 0.0) {
            return bad("trajectories.dtau and trajectories.tau_span must be positive".into());
        }
        self.gravity_config().validate()
    }
}

pub const DEFAULT_TOML: &str = include_str!("../../configs/default.toml");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parses_and_matches_defaults() {
        let cfg = RunConfig::builtin();
        assert_eq!(cfg.physics.mass, 1.0);
        assert_eq!(cfg.packet, PacketConfig::default());
        assert_eq!(cfg.gravity_config().newton_g, cfg.physics.newton_g);
    }

    #[test]
    fn missing_mass_is_named() {
        let err = RunConfig::parse("[physics]\ncharge = 0.0\n").unwrap_err();
        assert!(err.to_string().contains("mass"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("[physics]\nmass = 1.0\nspin = 0.5\n").is_err());
        assert!(RunConfig::parse("colour = 1\n[physics]\nmass = 1.0\n").is_err());
        assert!(RunConfig::parse("[physics]\nmass = 1.0\n[gravity]\nmass = 2.0\n").is_err());
    }

    #[test]
    fn bad_values_are_config_errors() {
        assert!(matches!(RunConfig::parse("[physics]\nmass = -1.0\n"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("[physics]\nmass = 1.0\n[packet]\nseparation = 0.3\n"), Err(Error::Config(_))));
    }
}
