//! Grids, four-vectors, diagonal metrics and covariant operators.

pub mod grid;
pub mod metric;
pub mod ops;
pub mod vector;

pub use grid::{Axis, AxisKind, Field, Grid, ScalarField};
pub use metric::{minkowski_dot, Coordinates, MetricField, Signature};
pub use ops::{christoffel_from_metric, dalembertian, divergence, gradient_up, ChristoffelField, FluxOperator};
pub use vector::{Covector, FourVector};
