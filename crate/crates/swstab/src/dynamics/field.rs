//! Split-step solver for the coupled Schrodinger-wave system with the wave field
//! carried explicitly on the radial nodes.

use num_complex::Complex64 as C64;

use crate::coupling::{CouplingSpec, RadialTable};
use crate::error::{Error, Result};
use crate::torus_volume;

use super::monitor::{Monitor, MonitorTrace};
use super::state::{pi_from_psi_dot, psi_dot_from_pi, FieldState, GridSpec};
use super::torus::TorusGrid;
use super::{Run, SolverOptions};

/// Per-node rotation data of the oscillator psi'' + omega_j^2 psi = f over one step.
#[derive(Clone, Debug)]
pub(crate) struct NodeRotation {
    dt: f64,
    omega: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
    /// sin(omega dt)/omega.
    sin_w: Vec<f64>,
    /// (1 - cos(omega dt))/omega^2.
    omc_w2: Vec<f64>,
}

impl NodeRotation {
    pub fn new(table: &RadialTable, c: f64, dt: f64) -> Self {
        let omega: Vec<f64> = table.r.iter().map(|r| c * r).collect();
        let cos = omega.iter().map(|w| (w * dt).cos()).collect();
        let sin: Vec<f64> = omega.iter().map(|w| (w * dt).sin()).collect();
        let sin_w = sin.iter().zip(&omega).map(|(s, w)| s / w).collect();
        let omc_w2 = omega
            .iter()
            .map(|w| {
                let h = (0.5 * w * dt).sin();
                2.0 * h * h / (w * w)
            })
            .collect();
        NodeRotation {
            dt,
            omega,
            cos,
            sin,
            sin_w,
            omc_w2,
        }
    }

    /// Exact step with constant forcing coef_j * amp; also returns int psi dt over the step.
    pub fn advance(&self, psi: &mut [C64], dpsi: &mut [C64], coef: &[f64], amp: C64, integral: &mut [C64]) {
        for j in 0..psi.len() {
            let w = self.omega[j];
            let eq = amp * (coef[j] / (w * w));
            let delta = psi[j] - eq;
            let v = dpsi[j];
            psi[j] = eq + delta * self.cos[j] + v * self.sin_w[j];
            dpsi[j] = -delta * (w * self.sin[j]) + v * self.cos[j];
            integral[j] = eq * self.dt + delta * self.sin_w[j] + v * self.omc_w2[j];
        }
    }
}

pub(crate) fn check_state(state: &FieldState, spec: &CouplingSpec, grid: &GridSpec) -> Result<()> {
    grid.validate(spec)?;
    if state.d != spec.d || state.n_x != grid.n_x || state.m_modes != grid.m_modes {
        return Err(Error::invalid(format!(
            "state shape (d={}, n_x={}, m_modes={}) does not match the grid (d={}, n_x={}, m_modes={})",
            state.d, state.n_x, state.m_modes, spec.d, grid.n_x, grid.m_modes
        )));
    }
    if state.n_xi != spec.table().len() {
        return Err(Error::invalid(format!(
            "state carries {} radial nodes, quadrature has {}",
            state.n_xi,
            spec.table().len()
        )));
    }
    Ok(())
}

/// Strang splitting: half free Schrodinger step, exact joint step of the wave field
/// (density frozen) and the potential phase exp(-i gamma int Phi dt), half free step.
pub fn evolve_sw_field(
    state0: &FieldState,
    spec: &CouplingSpec,
    grid: &GridSpec,
    opts: &SolverOptions,
) -> Result<Run> {
    let c = spec.finite_c()?;
    check_state(state0, spec, grid)?;
    let tg = TorusGrid::new(spec.d, grid.n_x);
    let steps = grid.steps();
    let dt = grid.dt;
    let table = spec.table();
    let vol = torus_volume(spec.d);
    let rot = NodeRotation::new(table, c, dt);
    let n = state0.n_xi;
    let modes = state0.wave_modes();

    let mut st = state0.clone();
    let mut dpsi: Vec<C64> = st.pi_hat.iter().map(|p| psi_dot_from_pi(*p, c)).collect();
    let monitor = Monitor::new(spec, &tg, &st, opts.reference_k, opts.light)?;
    let mut trace = MonitorTrace::default();
    let mut snapshots = Vec::new();
    let record = |st: &FieldState, trace: &mut MonitorTrace, snaps: &mut Vec<(f64, Vec<C64>)>| {
        monitor.record(st, trace);
        if opts.keep_snapshots {
            snaps.push((st.t, st.u.clone()));
        }
    };
    record(&st, &mut trace, &mut snapshots);

    // Per wave mode: grid index, sigma_{1,m} and the forcing profile -gamma c^2 (2 pi)^d sigma_{1,m} sigma_2_hat.
    let coupling: Vec<(usize, f64, Vec<f64>)> = modes
        .iter()
        .map(|m| {
            let s = spec.sigma1.coeff(m);
            let prof = table
                .shat
                .iter()
                .map(|sh| -spec.gamma * c * c * vol * s * sh)
                .collect();
            (tg.index_of(m), s, prof)
        })
        .collect();
    let mut integral = vec![C64::new(0.0, 0.0); n];
    let mut phase_coeffs = Vec::with_capacity(modes.len());
    let t0 = st.t;
    for step in 1..=steps {
        tg.kinetic_flow(&mut st.u, 0.5 * dt);
        let rho = tg.density_spectrum(&st.u);
        phase_coeffs.clear();
        for (mi, m) in modes.iter().enumerate() {
            let (gi, s, prof) = &coupling[mi];
            let amp = if *s != 0.0 { rho[*gi] } else { C64::new(0.0, 0.0) };
            rot.advance(
                &mut st.phi_hat[mi * n..(mi + 1) * n],
                &mut dpsi[mi * n..(mi + 1) * n],
                prof,
                amp,
                &mut integral,
            );
            if *s != 0.0 {
                let phi_bar: C64 = integral.iter().zip(&table.a).map(|(v, a)| v * a).sum::<C64>() * (vol * s);
                phase_coeffs.push((*m, phi_bar));
            }
        }
        let phase = tg.synthesize_real(&phase_coeffs);
        for (u, ph) in st.u.iter_mut().zip(&phase) {
            *u *= C64::from_polar(1.0, -spec.gamma * ph);
        }
        tg.kinetic_flow(&mut st.u, 0.5 * dt);
        st.t = t0 + step as f64 * dt;
        if opts.samples_at(step, steps) {
            for (p, v) in st.pi_hat.iter_mut().zip(&dpsi) {
                *p = pi_from_psi_dot(*v, c);
            }
            record(&st, &mut trace, &mut snapshots);
        }
    }
    for (p, v) in st.pi_hat.iter_mut().zip(&dpsi) {
        *p = pi_from_psi_dot(*v, c);
    }
    Ok(Run {
        state: st,
        trace,
        snapshots,
    })
}
