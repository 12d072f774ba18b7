//! Joint phase-space densities, the Liouville residual and the
//! infinitesimal Wigner-Moyal transform.

pub mod distribution;
pub mod em;
pub mod liouville;
pub mod transform;

pub use distribution::{GaussianCarrier, PhaseGrid, PhaseSpaceDistribution, SampledCarrier};
pub use em::{gauge_factor, line_integral, EMPotential};
pub use liouville::{liouville_residual, Force, PhaseResidual};
pub use transform::{
    mean_momentum_from_density, phase_space_moment, wigner_moyal_transform, CarrierDensity, DensityProvider,
    Gauge, KernelConvention, MomentumEstimate, TransformOptions, Transformed,
};
