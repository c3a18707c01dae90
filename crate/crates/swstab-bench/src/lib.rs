//! Shared fixtures for the benchmarks.

use swstab::dynamics::{perturbed_plane_wave, reference_perturbation, FieldState, GridSpec};
use swstab::{CouplingSpec, Mode, Speed};

/// d = 1, gamma = 0.1, cosine sigma_1, unit Gaussian sigma_2 at speed c.
pub fn reference_spec(c: f64) -> CouplingSpec {
    CouplingSpec::reference(0.1, Speed::Finite(c))
}

/// `steps` steps of size 5e-3 on n_x points.
pub fn short_grid(n_x: usize, steps: usize) -> GridSpec {
    GridSpec::new(n_x, 1, 5e-3, 5e-3 * steps as f64)
}

/// Plane wave k = 1 with the reference perturbation at size 0.05.
pub fn perturbed_state(spec: &CouplingSpec, grid: &GridSpec) -> FieldState {
    perturbed_plane_wave(spec, grid, Mode::one_d(1), 0.05, &reference_perturbation(1))
        .expect("reference state is valid")
}
