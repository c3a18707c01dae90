//! Memory-kernel formulation: the wave field is eliminated and its back-reaction
//! is a Volterra convolution of the density history with K(s) = c p(c s).
//!
//! Phi = Phi_Init + Phi_Cou, where Phi_Init is the free evolution of the initial
//! field and gamma Phi_Cou,m(t) = -gamma^2 (2 pi)^{2d} sigma_{1,m}^2 int_0^t K(s) rho_m(t - s) ds.

use std::collections::VecDeque;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::coupling::{CouplingSpec, RadialTable, Speed};
use crate::error::{Error, Result};
use crate::modes::Mode;
use crate::torus_volume;

use super::field::check_state;
use super::monitor::{Monitor, MonitorTrace};
use super::state::{psi_dot_from_pi, FieldState, GridSpec};
use super::torus::TorusGrid;
use super::{Run, SolverOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistoryPolicy {
    /// Fail once the history outgrows the buffer.
    Error,
    /// Drop the oldest samples and log a bound on the neglected tail.
    Truncate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemoryOptions {
    /// History samples kept; None derives it from the effective support of p.
    pub capacity: Option<usize>,
    pub policy: HistoryPolicy,
    /// |p| below support_tol * max |p| counts as outside the support.
    pub support_tol: f64,
}

impl Default for MemoryOptions {
    fn default() -> Self {
        MemoryOptions {
            capacity: None,
            policy: HistoryPolicy::Truncate,
            support_tol: 1e-15,
        }
    }
}

/// Smallest tau beyond which |p| stays below tol * max |p| on a scan up to tau_max.
pub fn kernel_support(table: &RadialTable, tol: f64, tau_max: f64) -> f64 {
    let step = 0.05;
    let n = (tau_max / step).ceil() as usize;
    let vals: Vec<f64> = (0..=n).map(|i| table.p(i as f64 * step).abs()).collect();
    let peak = vals.iter().cloned().fold(0.0, f64::max);
    match vals.iter().rposition(|v| *v > tol * peak) {
        Some(i) => ((i + 1) as f64 * step).min(tau_max),
        None => 0.0,
    }
}

/// Free evolution of the initial wave field, evaluated on demand.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialFieldContribution {
    Zero,
    Free {
        modes: Vec<Mode>,
        /// [mode][node].
        psi: Vec<C64>,
        psi_dot: Vec<C64>,
    },
}

impl InitialFieldContribution {
    /// Takes psi_hat and d/dt psi_hat of the coupled modes of a state.
    pub fn from_state(state: &FieldState, spec: &CouplingSpec) -> Result<Self> {
        let c = spec.finite_c()?;
        let mut modes = Vec::new();
        let mut psi = Vec::new();
        let mut psi_dot = Vec::new();
        for (m, _) in spec.sigma1.support() {
            let i = state
                .wave_index(&m)
                .ok_or_else(|| Error::invalid(format!("state lacks wave mode {m}")))?;
            let n = state.n_xi;
            modes.push(m);
            psi.extend_from_slice(&state.phi_hat[i * n..(i + 1) * n]);
            psi_dot.extend(state.pi_hat[i * n..(i + 1) * n].iter().map(|p| psi_dot_from_pi(*p, c)));
        }
        Ok(InitialFieldContribution::Free {
            modes,
            psi,
            psi_dot,
        })
    }

    /// Phi_Init,m(t) = (2 pi)^d sigma_{1,m} sum_j a_j (psi_j cos(w_j t) + psi_dot_j sin(w_j t)/w_j).
    fn eval(&self, m: &Mode, t: f64, spec: &CouplingSpec, omega: &[f64]) -> C64 {
        let InitialFieldContribution::Free {
            modes,
            psi,
            psi_dot,
        } = self
        else {
            return C64::new(0.0, 0.0);
        };
        let Some(i) = modes.iter().position(|mm| mm == m) else {
            return C64::new(0.0, 0.0);
        };
        let tab = spec.table();
        let n = tab.len();
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            let (s, c) = (omega[j] * t).sin_cos();
            acc += (psi[i * n + j] * c + psi_dot[i * n + j] * (s / omega[j])) * tab.a[j];
        }
        acc * (torus_volume(spec.d) * spec.sigma1.coeff(m))
    }
}

/// int_0^1 cos(xv) dv, int_0^1 sin(xv) dv, int_0^1 v cos(xv) dv, int_0^1 v sin(xv) dv.
fn unit_moments(x: f64) -> [f64; 4] {
    if x.abs() < 0.5 {
        let (mut j0c, mut j0s, mut j1c, mut j1s) = (0.0, 0.0, 0.0, 0.0);
        // term_k = (-1)^k x^k / k! accumulated with the right denominators.
        let mut pw = 1.0;
        for k in 0..24usize {
            let kf = k as f64;
            let sign_even = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                j0c += sign_even * pw / (kf + 1.0);
                j1c += sign_even * pw / (kf + 2.0);
            } else {
                j0s += sign_even * pw / (kf + 1.0);
                j1s += sign_even * pw / (kf + 2.0);
            }
            pw *= x / (kf + 1.0);
        }
        [j0c, j0s, j1c, j1s]
    } else {
        let (s, c) = x.sin_cos();
        let h = (0.5 * x).sin();
        let omc = 2.0 * h * h;
        [s / x, omc / x, s / x - omc / (x * x), s / (x * x) - c / x]
    }
}

/// (int_a^{a+h} sin(w s) ds, int_a^{a+h} sin(w s)(s - a) ds).
fn interval_moments(w: f64, a: f64, h: f64) -> (f64, f64) {
    let [j0c, j0s, j1c, j1s] = unit_moments(w * h);
    let (sa, ca) = (w * a).sin_cos();
    (h * (sa * j0c + ca * j0s), h * h * (sa * j1c + ca * j1s))
}

/// Product-integration weights of K(s) = sum_j C_j sin(w_j s) against a density that is
/// linear on each interval [i dt, (i+1) dt].
#[derive(Clone, Debug)]
pub struct VolterraWeights {
    dt: f64,
    coef: Vec<f64>,
    omega: Vec<f64>,
    /// Weight of the left / right endpoint of interval i.
    left: Vec<f64>,
    right: Vec<f64>,
}

impl VolterraWeights {
    pub fn new(table: &RadialTable, c: f64, dt: f64) -> Self {
        VolterraWeights {
            dt,
            coef: table.g.iter().zip(&table.r).map(|(g, r)| g * c / r).collect(),
            omega: table.r.iter().map(|r| c * r).collect(),
            left: Vec::new(),
            right: Vec::new(),
        }
    }

    fn weights(&self, a: f64, h: f64) -> (f64, f64) {
        let (mut l, mut r) = (0.0, 0.0);
        for (cj, w) in self.coef.iter().zip(&self.omega) {
            let (i0, i1) = interval_moments(*w, a, h);
            let beta = i1 / h;
            l += cj * (i0 - beta);
            r += cj * beta;
        }
        (l, r)
    }

    fn ensure(&mut self, intervals: usize) {
        while self.left.len() < intervals {
            let a = self.left.len() as f64 * self.dt;
            let (l, r) = self.weights(a, self.dt);
            self.left.push(l);
            self.right.push(r);
        }
    }

    /// int_0^t K(s) rho(t - s) ds at t = (n + 1/2) dt, where hist[i] = rho(t - i dt)
    /// (newest first) and rho0 = rho(0). When the history is shorter than n + 1 it is
    /// treated as truncated and the tail is dropped.
    pub fn convolve(&mut self, hist: &VecDeque<C64>, rho0: C64, n: usize) -> C64 {
        let full = hist.len() == n + 1;
        let intervals = if full { n } else { hist.len().saturating_sub(1) };
        self.ensure(intervals);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..intervals {
            acc += hist[i] * self.left[i] + hist[i + 1] * self.right[i];
        }
        if full {
            let (l, r) = self.weights(n as f64 * self.dt, 0.5 * self.dt);
            acc += hist[n] * l + rho0 * r;
        }
        acc
    }

    /// Rough bound on int_{s0}^{s0 + span} |K(s)| ds by the trapezoid rule.
    fn tail_bound(&self, s0: f64, span: f64) -> f64 {
        let n = 2000;
        let h = span / n as f64;
        let k = |s: f64| -> f64 {
            self.coef
                .iter()
                .zip(&self.omega)
                .map(|(c, w)| c * (w * s).sin())
                .sum::<f64>()
                .abs()
        };
        (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * k(s0 + i as f64 * h)
            })
            .sum::<f64>()
            * h
    }
}

/// Evolves U alone; the wave field enters only through Phi_Init and the density history.
/// The returned state carries a zero wave field.
pub fn evolve_sw_memory(
    state0: &FieldState,
    init: &InitialFieldContribution,
    spec: &CouplingSpec,
    grid: &GridSpec,
    opts: &SolverOptions,
    mem: &MemoryOptions,
) -> Result<Run> {
    let c = spec.finite_c()?;
    check_state(state0, spec, grid)?;
    let tg = TorusGrid::new(spec.d, grid.n_x);
    let dt = grid.dt;
    let steps = grid.steps();
    let table = spec.table();
    let vol = torus_volume(spec.d);
    let omega: Vec<f64> = table.r.iter().map(|r| c * r).collect();
    let capacity = match mem.capacity {
        Some(cap) => cap.max(2),
        None => {
            let tau = kernel_support(table, mem.support_tol, 200.0);
            ((tau / (c * dt)).ceil() as usize + 2).max(2)
        }
    };
    let mut weights = VolterraWeights::new(table, c, dt);

    let hspec = spec.with_c(Speed::Infinite);
    let mut st = state0.clone();
    st.phi_hat.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
    st.pi_hat.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
    let monitor = Monitor::new(&hspec, &tg, &st, opts.reference_k, opts.light)?;
    let mut trace = MonitorTrace::default();
    let mut snapshots = Vec::new();
    monitor.record(&st, &mut trace);
    if opts.keep_snapshots {
        snapshots.push((st.t, st.u.clone()));
    }

    let coupled: Vec<(Mode, usize, f64)> = spec
        .sigma1
        .support()
        .into_iter()
        .map(|(m, s)| (m, tg.index_of(&m), s))
        .collect();
    let rho_init = tg.density_spectrum(&st.u);
    let rho0: Vec<C64> = coupled.iter().map(|(_, gi, _)| rho_init[*gi]).collect();
    let mut hist: Vec<VecDeque<C64>> = vec![VecDeque::with_capacity(capacity); coupled.len()];
    let mut warned = false;
    let mut phase_coeffs = Vec::with_capacity(coupled.len());
    let t0 = st.t;
    for n in 0..steps {
        tg.kinetic_flow(&mut st.u, 0.5 * dt);
        let rho = tg.density_spectrum(&st.u);
        if hist[0].len() == capacity {
            match mem.policy {
                HistoryPolicy::Error => {
                    return Err(Error::HistoryOverflow {
                        step: n,
                        capacity,
                    })
                }
                HistoryPolicy::Truncate => {
                    if !warned {
                        let s0 = (capacity - 1) as f64 * dt;
                        let bound = weights.tail_bound(s0, (steps as f64 * dt - s0).max(dt));
                        log::warn!(
                            "density history truncated at {capacity} samples; neglected kernel mass <= {bound:.3e}"
                        );
                        warned = true;
                    }
                    hist.iter_mut().for_each(|h| {
                        h.pop_back();
                    });
                }
            }
        }
        for (h, (_, gi, _)) in hist.iter_mut().zip(&coupled) {
            h.push_front(rho[*gi]);
        }
        let t_mid = t0 + (n as f64 + 0.5) * dt;
        phase_coeffs.clear();
        for (ci, (m, _, s)) in coupled.iter().enumerate() {
            let conv = weights.convolve(&hist[ci], rho0[ci], n);
            let phi_cou = conv * (-spec.gamma * vol * vol * s * s);
            let phi_init = init.eval(m, t_mid - t0, spec, &omega);
            phase_coeffs.push((*m, (phi_init + phi_cou) * dt));
        }
        let phase = tg.synthesize_real(&phase_coeffs);
        for (u, ph) in st.u.iter_mut().zip(&phase) {
            *u *= C64::from_polar(1.0, -spec.gamma * ph);
        }
        tg.kinetic_flow(&mut st.u, 0.5 * dt);
        st.t = t0 + (n + 1) as f64 * dt;
        if opts.samples_at(n + 1, steps) {
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
