//! Plane-wave equilibria, dispersion relation and the conserved energies.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::coupling::{CouplingConstants, CouplingSpec};
use crate::dynamics::state::{potential_modes, psi_dot_from_pi, CouplingLayout, FieldState, GridSpec};
use crate::dynamics::torus::TorusGrid;
use crate::error::{Error, Result};
use crate::modes::Mode;
use crate::torus_volume;

/// omega = Upsilon* - |k|^2 / 2.
pub fn dispersion_omega(k: &Mode, constants: &CouplingConstants) -> f64 {
    constants.upsilon_star - 0.5 * k.norm2() as f64
}

/// U = e^{i(omega t + k.x)} paired with the stationary field -gamma <sigma_1> Gamma.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWave {
    pub k: Mode,
    pub omega: f64,
    pub upsilon_star: f64,
    /// Gamma_hat(r_j) = sigma_2_hat(r_j) / r_j^2 at the radial nodes.
    pub gamma_hat: Vec<f64>,
    /// Psi*_hat(r_j) = -gamma <sigma_1> Gamma_hat(r_j).
    pub psi_star: Vec<f64>,
}

impl PlaneWave {
    pub fn new(spec: &CouplingSpec, k: Mode) -> Result<Self> {
        if k.d != spec.d {
            return Err(Error::invalid(format!("k = {k} does not match d = {}", spec.d)));
        }
        let consts = spec.constants();
        let t = spec.table();
        let gamma_hat: Vec<f64> = t.shat.iter().zip(&t.r).map(|(s, r)| s / (r * r)).collect();
        let scale = -spec.gamma * consts.sigma1_mean;
        let psi_star = gamma_hat.iter().map(|g| scale * g).collect();
        Ok(PlaneWave {
            k,
            omega: dispersion_omega(&k, &consts),
            upsilon_star: consts.upsilon_star,
            gamma_hat,
            psi_star,
        })
    }

    /// Exact value e^{i(omega t + k.x)} at a point.
    pub fn value(&self, t: f64, x: [f64; 2]) -> C64 {
        let kx = self.k.c[0] as f64 * x[0] + self.k.c[1] as f64 * x[1];
        C64::from_polar(1.0, self.omega * t + kx)
    }

    /// (2 pi)^d / 4 (k^2 - Upsilon*), the common value of H_SW and H_Ha.
    pub fn energy(&self) -> f64 {
        torus_volume(self.k.d) / 4.0 * (self.k.norm2() as f64 - self.upsilon_star)
    }
}

/// The plane wave sampled at t = 0 on the grid, with its stationary wave field.
pub fn plane_wave_state(pw: &PlaneWave, spec: &CouplingSpec, grid: &GridSpec) -> Result<FieldState> {
    grid.validate(spec)?;
    let tg = TorusGrid::new(spec.d, grid.n_x);
    if !tg.resolves(&pw.k) {
        return Err(Error::invalid(format!(
            "k = {} is not resolved by n_x = {}",
            pw.k, grid.n_x
        )));
    }
    let mut st = FieldState::zeros(spec.d, grid.n_x, grid.m_modes, spec.table().len());
    for (i, v) in st.u.iter_mut().enumerate() {
        *v = pw.value(0.0, tg.point(i));
    }
    let psi0 = st.psi_mut(&Mode::zero(spec.d)).expect("mode 0 is stored");
    for (p, s) in psi0.iter_mut().zip(&pw.psi_star) {
        *p = C64::new(*s, 0.0);
    }
    Ok(st)
}

/// Conserved and monitored quantities of a state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    /// H_SW; absent in the Hartree limit.
    pub h_sw: Option<f64>,
    pub h_ha: f64,
    /// F(U) = ||U||^2 / 2.
    pub l2_mass: f64,
    /// G_j(U) = (1/2) int (d_j U / i) conj(U).
    pub momentum: [f64; 2],
}

impl EnergyLedger {
    pub fn compute(state: &FieldState, spec: &CouplingSpec) -> Result<Self> {
        let grid = TorusGrid::new(state.d, state.n_x);
        Ok(Self::compute_on(&grid, state, spec))
    }

    pub(crate) fn compute_on(grid: &TorusGrid, state: &FieldState, spec: &CouplingSpec) -> Self {
        let uh = grid.spectrum(&state.u);
        let rho = grid.density_spectrum(&state.u);
        let h_sw = spec
            .c
            .finite()
            .map(|c| hsw_from_parts(grid, state, spec, &uh, &rho, c));
        let vol = torus_volume(state.d);
        let mut momentum = [0.0; 2];
        for (m, v) in grid.modes.iter().zip(&uh) {
            momentum[0] += 0.5 * vol * m.c[0] as f64 * v.norm_sqr();
            momentum[1] += 0.5 * vol * m.c[1] as f64 * v.norm_sqr();
        }
        EnergyLedger {
            h_sw,
            h_ha: hha_from_parts(grid, spec, &uh, &rho),
            l2_mass: 0.5 * grid.l2_sq(&state.u),
            momentum,
        }
    }
}

fn kinetic(grid: &TorusGrid, uh: &[C64]) -> f64 {
    0.25 * torus_volume(grid.d)
        * uh.iter().zip(&grid.k2).map(|(v, k2)| k2 * v.norm_sqr()).sum::<f64>()
}

fn hha_from_parts(grid: &TorusGrid, spec: &CouplingSpec, uh: &[C64], rho: &[C64]) -> f64 {
    let vol = torus_volume(grid.d);
    let kappa = spec.table().kappa();
    let g2 = spec.gamma * spec.gamma;
    let inter: f64 = spec
        .sigma1
        .support()
        .iter()
        .map(|(m, s)| vol * vol * s * s * rho[grid.index_of(m)].norm_sqr())
        .sum();
    kinetic(grid, uh) - 0.25 * g2 * kappa * vol * inter
}

fn hsw_from_parts(
    grid: &TorusGrid,
    state: &FieldState,
    spec: &CouplingSpec,
    uh: &[C64],
    rho: &[C64],
    c: f64,
) -> f64 {
    let vol = torus_volume(grid.d);
    let t = spec.table();
    let mut wave = 0.0;
    for (mi, _) in state.wave_modes().iter().enumerate() {
        let base = mi * state.n_xi;
        for j in 0..state.n_xi {
            let psi = state.phi_hat[base + j];
            let pi = state.pi_hat[base + j];
            let r = t.r[j];
            wave += t.measure[j] * (c * c * pi.norm_sqr() + 0.25 * r * r * psi.norm_sqr());
        }
    }
    wave *= vol;
    let layout = CouplingLayout::new(spec, grid, state);
    let phi = potential_modes(spec, &layout, state);
    let coupling: f64 = phi
        .iter()
        .zip(&layout.grid_idx)
        .map(|(p, &gi)| (p * rho[gi].conj()).re)
        .sum::<f64>()
        * vol
        * 0.5
        * spec.gamma;
    kinetic(grid, uh) + wave + coupling
}

/// H_SW = 1/4 int |grad U|^2 + int int (c^2 Pi^2 + 1/4 |grad_z Psi|^2) + gamma/2 int Phi |U|^2.
pub fn energy_hsw(state: &FieldState, spec: &CouplingSpec) -> Result<f64> {
    let c = spec.finite_c()?;
    let grid = TorusGrid::new(state.d, state.n_x);
    let uh = grid.spectrum(&state.u);
    let rho = grid.density_spectrum(&state.u);
    Ok(hsw_from_parts(&grid, state, spec, &uh, &rho, c))
}

/// H_Ha = 1/4 int |grad U|^2 - gamma^2 kappa / 4 int (Sigma * |U|^2) |U|^2.
pub fn energy_hha(u: &[C64], d: usize, spec: &CouplingSpec) -> Result<f64> {
    let n = (u.len() as f64).powf(1.0 / d as f64).round() as usize;
    if n.pow(d as u32) != u.len() {
        return Err(Error::invalid("grid function length is not n^d"));
    }
    let grid = TorusGrid::new(d, n);
    let uh = grid.spectrum(u);
    let rho = grid.density_spectrum(u);
    Ok(hha_from_parts(&grid, spec, &uh, &rho))
}

/// Wave energy int int (c^2 Pi^2 + 1/4 |grad_z Psi|^2) alone.
pub fn wave_energy(state: &FieldState, spec: &CouplingSpec) -> Result<f64> {
    let c = spec.finite_c()?;
    let t = spec.table();
    let mut wave = 0.0;
    for mi in 0..state.wave_modes().len() {
        for j in 0..state.n_xi {
            let k = mi * state.n_xi + j;
            let dpsi = psi_dot_from_pi(state.pi_hat[k], c);
            wave += t.measure[j]
                * (dpsi.norm_sqr() / (4.0 * c * c) + 0.25 * t.r[j] * t.r[j] * state.phi_hat[k].norm_sqr());
        }
    }
    Ok(wave * torus_volume(state.d))
}
