//! Split-step solver for the Hartree equation
//! i U_t + (1/2) Laplace U = -gamma^2 kappa (Sigma * |U|^2) U.

use num_complex::Complex64 as C64;

use crate::coupling::{CouplingSpec, Speed};
use crate::error::{Error, Result};
use crate::torus_volume;

use super::monitor::{Monitor, MonitorTrace};
use super::state::{FieldState, GridSpec};
use super::torus::TorusGrid;
use super::{Run, SolverOptions};

/// Strang splitting: half kinetic step, full potential phase, half kinetic step.
/// The returned state carries a zero wave field.
pub fn evolve_hartree(
    u0: &[C64],
    spec: &CouplingSpec,
    grid: &GridSpec,
    opts: &SolverOptions,
) -> Result<Run> {
    grid.validate(spec)?;
    if u0.len() != grid.n_x.pow(spec.d as u32) {
        return Err(Error::invalid(format!(
            "U0 has {} values, grid needs {}",
            u0.len(),
            grid.n_x.pow(spec.d as u32)
        )));
    }
    let hspec = spec.with_c(Speed::Infinite);
    let tg = TorusGrid::new(spec.d, grid.n_x);
    let mut st = FieldState::zeros(spec.d, grid.n_x, grid.m_modes, spec.table().len());
    st.u.copy_from_slice(u0);
    let monitor = Monitor::new(&hspec, &tg, &st, opts.reference_k, opts.light)?;
    let mut trace = MonitorTrace::default();
    let mut snapshots = Vec::new();
    monitor.record(&st, &mut trace);
    if opts.keep_snapshots {
        snapshots.push((st.t, st.u.clone()));
    }
    let vol = torus_volume(spec.d);
    let strength = spec.gamma * spec.gamma * spec.table().kappa();
    let support: Vec<_> = spec
        .sigma1
        .support()
        .into_iter()
        .map(|(m, s)| (m, tg.index_of(&m), vol * vol * s * s))
        .collect();
    let steps = grid.steps();
    let dt = grid.dt;
    let mut coeffs = Vec::with_capacity(support.len());
    for step in 1..=steps {
        tg.kinetic_flow(&mut st.u, 0.5 * dt);
        let rho = tg.density_spectrum(&st.u);
        coeffs.clear();
        coeffs.extend(support.iter().map(|(m, gi, w)| (*m, rho[*gi] * *w)));
        let v = tg.synthesize_real(&coeffs);
        for (u, vx) in st.u.iter_mut().zip(&v) {
            *u *= C64::from_polar(1.0, strength * vx * dt);
        }
        tg.kinetic_flow(&mut st.u, 0.5 * dt);
        st.t = step as f64 * dt;
        if opts.samples_at(step, steps) {
            monitor.record(&st, &mut trace);
            if opts.keep_snapshots {
                snapshots.push((st.t, st.u.clone()));
            }
        }
    }
    Ok(Run {
        state: st,
        trace,
        snapshots,
    })
}
