//! Spectral, linearized and nonlinear stability of plane waves for the
//! Hartree equation and the Schrodinger-wave system on the torus T^d.
//!
//! Module layout:
//! - [`coupling`]: form functions, kappa, kappa_s, kernel p, smallness.
//! - [`planewave`]: equilibria, dispersion relation, energies.
//! - [`hartree_spec`]: per-mode 2x2 analysis of the linearized Hartree equation.
//! - [`sw_spec`]: cubic/counting analysis and dispersion roots for the coupled system.
//! - [`dynamics`]: linear propagators, split-step solvers, memory-kernel solver, growth fits.
//! - [`io`]: config, reports, CSV series and checkpoints.

pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod hartree_spec;
pub mod io;
pub mod modes;
pub mod planewave;
pub mod report;
pub mod sw_spec;

pub use num_complex::Complex64 as C64;

pub use coupling::{
    CouplingConstants, CouplingSpec, RadialQuadrature, Sigma1Spec, Sigma2Kind, Sigma2Spec, Speed,
};
pub use dynamics::{FieldState, GridSpec, MonitorTrace};
pub use error::{Error, Result};
pub use hartree_spec::{HartreeModeMatrix, HartreeModeVerdict};
pub use modes::Mode;
pub use planewave::{EnergyLedger, PlaneWave};
pub use report::StabilityReport;
pub use sw_spec::{CubicReport, SwCountReport, UnstableRoot};

/// (2 pi)^d.
pub fn torus_volume(d: usize) -> f64 {
    (2.0 * std::f64::consts::PI).powi(d as i32)
}
