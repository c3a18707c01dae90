use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::coupling::CouplingSpec;
use crate::error::{Error, Result};
use crate::modes::Mode;
use crate::torus_volume;

use super::torus::TorusGrid;

/// Discretization parameters of a time-dependent run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Points per torus dimension (power of two).
    pub n_x: usize,
    /// Wave-field x-modes kept: |m|_inf <= m_modes.
    pub m_modes: usize,
    pub dt: f64,
    pub t_final: f64,
}

impl GridSpec {
    pub fn new(n_x: usize, m_modes: usize, dt: f64, t_final: f64) -> Self {
        GridSpec {
            n_x,
            m_modes,
            dt,
            t_final,
        }
    }

    pub fn validate(&self, spec: &CouplingSpec) -> Result<()> {
        if !self.n_x.is_power_of_two() || self.n_x < 4 {
            return Err(Error::invalid(format!(
                "n_x = {} must be a power of two >= 4",
                self.n_x
            )));
        }
        if self.n_x < 2 * self.m_modes + 2 {
            return Err(Error::invalid(format!(
                "n_x = {} must be >= 2 m_modes + 2 = {}",
                self.n_x,
                2 * self.m_modes + 2
            )));
        }
        if (self.m_modes as i64) < spec.sigma1.band_limit() {
            return Err(Error::invalid(format!(
                "m_modes = {} is below the sigma1 band limit {}",
                self.m_modes,
                spec.sigma1.band_limit()
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::invalid(format!(
                "t_final must be >= 0, got {}",
                self.t_final
            )));
        }
        Ok(())
    }

    /// Number of steps to reach t_final, rounding to the nearest integer.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// Schrodinger amplitude on the x-grid plus the radial wave field per x-mode.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub d: usize,
    pub n_x: usize,
    pub m_modes: usize,
    pub n_xi: usize,
    pub u: Vec<C64>,
    /// psi_hat(t, m, xi_j), layout [mode][node] over `wave_modes()`.
    pub phi_hat: Vec<C64>,
    /// Pi_hat = -(1/(2c^2)) d/dt psi_hat, same layout.
    pub pi_hat: Vec<C64>,
}

impl FieldState {
    pub fn zeros(d: usize, n_x: usize, m_modes: usize, n_xi: usize) -> Self {
        let nw = Mode::box_iter(d, m_modes as i64).len();
        FieldState {
            t: 0.0,
            d,
            n_x,
            m_modes,
            n_xi,
            u: vec![C64::new(0.0, 0.0); n_x.pow(d as u32)],
            phi_hat: vec![C64::new(0.0, 0.0); nw * n_xi],
            pi_hat: vec![C64::new(0.0, 0.0); nw * n_xi],
        }
    }

    pub fn wave_modes(&self) -> Vec<Mode> {
        Mode::box_iter(self.d, self.m_modes as i64)
    }

    pub fn wave_index(&self, m: &Mode) -> Option<usize> {
        let b = self.m_modes as i64;
        if m.linf() > b {
            return None;
        }
        let w = 2 * b + 1;
        Some(if self.d == 1 {
            (m.c[0] + b) as usize
        } else {
            ((m.c[0] + b) * w + (m.c[1] + b)) as usize
        })
    }

    pub fn psi(&self, m: &Mode) -> Option<&[C64]> {
        let i = self.wave_index(m)?;
        Some(&self.phi_hat[i * self.n_xi..(i + 1) * self.n_xi])
    }

    pub fn psi_mut(&mut self, m: &Mode) -> Option<&mut [C64]> {
        let i = self.wave_index(m)?;
        Some(&mut self.phi_hat[i * self.n_xi..(i + 1) * self.n_xi])
    }

    pub fn pi_mut(&mut self, m: &Mode) -> Option<&mut [C64]> {
        let i = self.wave_index(m)?;
        Some(&mut self.pi_hat[i * self.n_xi..(i + 1) * self.n_xi])
    }

    /// d/dt psi_hat recovered from the stored Pi.
    pub fn psi_dot(&self, c: f64) -> Vec<C64> {
        self.pi_hat.iter().map(|p| psi_dot_from_pi(*p, c)).collect()
    }

    pub fn set_psi_dot(&mut self, psi_dot: &[C64], c: f64) {
        for (p, v) in self.pi_hat.iter_mut().zip(psi_dot) {
            *p = pi_from_psi_dot(*v, c);
        }
    }

    /// Largest violation of psi_hat(-m) = conj(psi_hat(m)) over both fields.
    pub fn reality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for m in self.wave_modes() {
            let (i, j) = (
                self.wave_index(&m).unwrap(),
                self.wave_index(&m.neg()).unwrap(),
            );
            for node in 0..self.n_xi {
                for f in [&self.phi_hat, &self.pi_hat] {
                    let a = f[i * self.n_xi + node];
                    let b = f[j * self.n_xi + node];
                    worst = worst.max((a - b.conj()).norm());
                }
            }
        }
        worst
    }

    /// Mass-type L2 norm of U.
    pub fn l2_sq(&self) -> f64 {
        torus_volume(self.d) / self.u.len() as f64 * self.u.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }
}

pub fn pi_from_psi_dot(psi_dot: C64, c: f64) -> C64 {
    -psi_dot / (2.0 * c * c)
}

pub fn psi_dot_from_pi(pi: C64, c: f64) -> C64 {
    -pi * (2.0 * c * c)
}

/// Coupled wave modes (sigma_{1,m} != 0) with their grid and field indices.
#[derive(Clone, Debug)]
pub(crate) struct CouplingLayout {
    pub modes: Vec<Mode>,
    pub sigma: Vec<f64>,
    pub grid_idx: Vec<usize>,
    pub wave_idx: Vec<usize>,
}

impl CouplingLayout {
    pub fn new(spec: &CouplingSpec, grid: &TorusGrid, state: &FieldState) -> Self {
        let mut out = CouplingLayout {
            modes: vec![],
            sigma: vec![],
            grid_idx: vec![],
            wave_idx: vec![],
        };
        for (m, s) in spec.sigma1.support() {
            out.modes.push(m);
            out.sigma.push(s);
            out.grid_idx.push(grid.index_of(&m));
            out.wave_idx.push(
                state
                    .wave_index(&m)
                    .expect("m_modes covers the sigma1 band limit"),
            );
        }
        out
    }
}

/// Phi_m (without the gamma factor) for each coupled mode:
/// (2 pi)^d sigma_{1,m} sum_j a_j psi_hat(m, xi_j).
pub(crate) fn potential_modes(
    spec: &CouplingSpec,
    layout: &CouplingLayout,
    state: &FieldState,
) -> Vec<C64> {
    let a = &spec.table().a;
    let vol = torus_volume(spec.d);
    layout
        .wave_idx
        .iter()
        .zip(&layout.sigma)
        .map(|(&wi, &s)| {
            let psi = &state.phi_hat[wi * state.n_xi..(wi + 1) * state.n_xi];
            let acc: C64 = psi.iter().zip(a).map(|(p, a)| p * a).sum();
            acc * (vol * s)
        })
        .collect()
}
