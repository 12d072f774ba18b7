//! Run files, reports and the experiment drivers behind the `relquant`
//! binary.

pub mod config;
pub mod plot;
pub mod report;
pub mod run;
pub mod suites;

pub use config::{PacketConfig, RunConfig, StationaryConfig, TrajectoryConfig, TransformConfig, DEFAULT_TOML};
pub use plot::{export, LinePlot, Series};
pub use report::{config_hash, Check, Relation, RunReport, Timing};
pub use run::{execute, run, RunOptions, Subcommand};
pub use suites::Sink;
