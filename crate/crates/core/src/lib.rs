//! Recovery of functions in the Paley-Wiener amalgam space `(PW, l¹)`:
//! functions whose spectrum, cut into 2π-wide bands, has summable band-wise
//! L² norms.
//!
//! Each band of `f̂` is shifted to baseband, giving `g_m ∈ PW_π`.
//! Every `g_m` is interpolated on a complete interpolating sequence with a
//! regular family of interpolators `φ_α` (Gaussian or Poisson kernels).
//! The modulated sum `J_α f(x) = Σ_m e^{2πimx} I_α g_m(x)` converges to `f`
//! as α grows, in L², in the amalgam norm and uniformly.
//!
//! Modules, bottom up:
//! - [`spectral`]: frequency grids, band spectra and the three norms
//! - [`families`]: kernels and their regularity certificate
//! - [`nodes`]: uniform and Kadec-perturbed node sets
//! - [`bands`]: test signals, band slicing and node sampling
//! - [`engine`]: collocation solves and the approximant
//! - [`metrics`]: error functionals and α sweeps
//! - [`config`] / [`commands`]: the experiment runner behind the CLI

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bands;
pub mod commands;
pub mod config;
pub mod engine;
pub mod error;
pub mod exec;
pub mod families;
pub mod metrics;
pub mod nodes;
pub mod quadrature;
pub mod spectral;

pub use bands::{builtin_signals, TestSignal};
pub use engine::{reconstruct, Approximant, CoefficientSet, Setup};
pub use error::{Error, Result};
pub use exec::Exec;
pub use families::{FamilyKind, InterpolatorFamily};
pub use metrics::{error_report, sweep, ErrorReport, SweepEntry};
pub use nodes::{perturbed_nodes, uniform_nodes, NodeSet};
pub use spectral::{AmalgamSpectrum, BandSpectrum, FrequencyGrid, SpatialGrid};
