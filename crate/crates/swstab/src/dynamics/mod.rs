//! Time-domain solvers and their monitors.

pub mod climit;
pub mod field;
pub mod growth;
pub mod hartree;
pub mod linear;
pub mod memory;
pub mod monitor;
pub mod perturb;
pub mod state;
pub mod torus;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::modes::Mode;

pub use climit::{c_limit_study, CLimitRow, CLimitStudy};
pub use field::evolve_sw_field;
pub use growth::{fit_growth, measure_growth_rate, GrowthFit, GrowthMeasurement, GrowthOptions};
pub use hartree::evolve_hartree;
pub use linear::{
    evolve_linear_hartree, evolve_linear_sw, evolve_linear_sw_mode0, LinearHartreeState,
    LinearSwState, Mode0Trajectory,
};
pub use memory::{evolve_sw_memory, HistoryPolicy, InitialFieldContribution, MemoryOptions};
pub use monitor::MonitorTrace;
pub use perturb::{eigenvector_perturbation, perturbed_plane_wave, reference_perturbation};
pub use state::{FieldState, GridSpec};

/// Sampling and bookkeeping shared by the nonlinear solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Record monitors (and snapshots) every this many steps; 0 records only the endpoints.
    pub sample_every: usize,
    pub keep_snapshots: bool,
    /// Wave vector of the plane wave the fluctuation is measured against.
    pub reference_k: Mode,
    /// Skip the energy monitors and record only time and fluctuation size.
    pub light: bool,
}

impl SolverOptions {
    pub fn new(reference_k: Mode, sample_every: usize) -> Self {
        SolverOptions {
            sample_every,
            keep_snapshots: false,
            reference_k,
            light: false,
        }
    }

    pub fn with_snapshots(mut self) -> Self {
        self.keep_snapshots = true;
        self
    }

    pub fn light(mut self) -> Self {
        self.light = true;
        self
    }

    pub(crate) fn samples_at(&self, step: usize, total: usize) -> bool {
        step == 0 || step == total || (self.sample_every > 0 && step % self.sample_every == 0)
    }
}

/// Output of a nonlinear run.
#[derive(Clone, Debug)]
pub struct Run {
    pub state: FieldState,
    pub trace: MonitorTrace,
    /// (t, U on the grid) at each sample, if requested.
    pub snapshots: Vec<(f64, Vec<C64>)>,
}

impl Run {
    pub fn final_u(&self) -> &[C64] {
        &self.state.u
    }
}

/// ||a - b||_{L2(T^d)} for grid functions.
pub fn l2_distance(a: &[C64], b: &[C64], d: usize) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    (crate::torus_volume(d) / a.len() as f64 * s).sqrt()
}

/// sup over matching sample times of the L2 gap between two snapshot series.
pub fn sup_gap(a: &[(f64, Vec<C64>)], b: &[(f64, Vec<C64>)], d: usize) -> f64 {
    a.iter()
        .zip(b)
        .map(|((ta, ua), (tb, ub))| {
            debug_assert!((ta - tb).abs() < 1e-9);
            l2_distance(ua, ub, d)
        })
        .fold(0.0, f64::max)
}
