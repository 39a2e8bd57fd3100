//! Scattering of coupled-mode networks with a lossy artificial atom, and the
//! isolator and circulator presets built from them.
//!
//! A [`Network`] is a set of bosonic modes, pairwise couplings with phases,
//! and ports. [`scattering_matrix`] solves the linearised input-output
//! problem at one frequency; [`analysis::sweep`] does it over a grid.
//! The [`device`] module builds the preset devices, their optimal parameter
//! sets, and independent closed-form scattering matrices to check against.

// Parameter validation uses `!(x >= 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod device;
pub mod error;
pub mod exec;
pub mod network;
pub mod scattering;

pub use error::{Error, Result};
pub use exec::Execution;
pub use network::{Coupling, Mode, ModeKind, Network, NetworkDescription, Port};
pub use scattering::{
    dynamical_matrix, reflection, scattering_matrix, transmission, ScatteringMatrix,
};
