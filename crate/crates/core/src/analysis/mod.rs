//! Frequency sweeps and the figures of merit read off them.

mod adiabatic;
mod metrics;
mod spectrum;
mod symmetry;

pub use adiabatic::{effective_damping, reduce_auxiliary, EffectiveDamping};
pub use metrics::{bandwidth, isolation_ratio, DEFAULT_BANDWIDTH_THRESHOLD, ZERO_AMPLITUDE};
pub use spectrum::{sweep, sweep_points, sweep_with, FrequencyGrid, Spectrum, SpectrumPoint};
pub use symmetry::{
    classify_symmetry, symmetry_residuals, SpectralSymmetry, SymmetryResiduals, SYMMETRY_TOLERANCE,
};
