//! Per-sample diagnostics: energies, mass, momentum, fluctuation norms and the
//! quadratic remainder of the coupled system.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::coupling::CouplingSpec;
use crate::modes::Mode;
use crate::planewave::{EnergyLedger, PlaneWave};
use crate::torus_volume;

use super::state::{potential_modes, psi_dot_from_pi, CouplingLayout, FieldState};
use super::torus::TorusGrid;

/// Column-oriented time series; every column has one entry per sample.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MonitorTrace {
    pub t: Vec<f64>,
    /// NaN when c is infinite.
    pub h_sw: Vec<f64>,
    pub h_ha: Vec<f64>,
    pub l2_mass: Vec<f64>,
    /// H1 norm of u = e^{-i(omega t + k.x)} U - 1.
    pub h1_fluct: Vec<f64>,
    /// L2 norm of the nonzero-mode part of u (phase invariant).
    pub fluct_nonzero: Vec<f64>,
    /// Quadratic form E_0 of u.
    pub e0: Vec<f64>,
    pub momentum_x: Vec<f64>,
    pub momentum_y: Vec<f64>,
    /// ||F(X)|| and C_F ||X||^2; NaN when c is infinite.
    pub remainder: Vec<f64>,
    pub remainder_bound: Vec<f64>,
}

impl MonitorTrace {
    pub const COLUMNS: [&'static str; 11] = [
        "t",
        "h_sw",
        "h_ha",
        "l2_mass",
        "h1_fluct",
        "fluct_nonzero",
        "e0",
        "momentum_x",
        "momentum_y",
        "remainder",
        "remainder_bound",
    ];

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn columns(&self) -> [&[f64]; 11] {
        [
            &self.t,
            &self.h_sw,
            &self.h_ha,
            &self.l2_mass,
            &self.h1_fluct,
            &self.fluct_nonzero,
            &self.e0,
            &self.momentum_x,
            &self.momentum_y,
            &self.remainder,
            &self.remainder_bound,
        ]
    }

    pub fn push_row(&mut self, row: [f64; 11]) {
        let cols: [&mut Vec<f64>; 11] = [
            &mut self.t,
            &mut self.h_sw,
            &mut self.h_ha,
            &mut self.l2_mass,
            &mut self.h1_fluct,
            &mut self.fluct_nonzero,
            &mut self.e0,
            &mut self.momentum_x,
            &mut self.momentum_y,
            &mut self.remainder,
            &mut self.remainder_bound,
        ];
        for (c, v) in cols.into_iter().zip(row) {
            c.push(v);
        }
    }

    pub fn row(&self, i: usize) -> [f64; 11] {
        self.columns().map(|c| c[i])
    }

    /// max |x(t) - x(0)| / |x(0)| over a column.
    pub fn relative_drift(col: &[f64]) -> f64 {
        let Some(&x0) = col.first() else { return 0.0 };
        let scale = if x0 == 0.0 { 1.0 } else { x0.abs() };
        col.iter().map(|x| (x - x0).abs()).fold(0.0, f64::max) / scale
    }

    /// Columns of equal length and strictly increasing times.
    pub fn is_consistent(&self) -> bool {
        let n = self.t.len();
        self.columns().iter().all(|c| c.len() == n) && self.t.windows(2).all(|w| w[1] > w[0])
    }
}

/// C_F = gamma sqrt(<sigma_1> kappa ||sigma_1||_inf) + gamma c ||sigma_2||_{L2} ||sigma_1||_{L2}.
pub fn remainder_constant(spec: &CouplingSpec, c: f64) -> f64 {
    let t = spec.table();
    let s1 = &spec.sigma1;
    spec.gamma * (s1.mean() * t.kappa() * s1.linf_bound()).sqrt()
        + spec.gamma * c * t.sigma2_l2() * s1.l2_norm()
}

pub(crate) struct Monitor<'a> {
    spec: &'a CouplingSpec,
    grid: &'a TorusGrid,
    pw: PlaneWave,
    layout: CouplingLayout,
    /// e^{-i k.x} on the grid.
    dephase: Vec<C64>,
    c_f: Option<f64>,
    light: bool,
}

impl<'a> Monitor<'a> {
    pub fn new(
        spec: &'a CouplingSpec,
        grid: &'a TorusGrid,
        state: &FieldState,
        k: Mode,
        light: bool,
    ) -> crate::Result<Self> {
        let pw = PlaneWave::new(spec, k)?;
        let dephase = (0..grid.len)
            .map(|i| {
                let x = grid.point(i);
                C64::from_polar(1.0, -(k.c[0] as f64 * x[0] + k.c[1] as f64 * x[1]))
            })
            .collect();
        Ok(Monitor {
            spec,
            grid,
            pw,
            layout: CouplingLayout::new(spec, grid, state),
            dephase,
            c_f: spec.c.finite().map(|c| remainder_constant(spec, c)),
            light,
        })
    }

    /// u = e^{-i(omega t + k.x)} U - 1 on the grid.
    pub fn fluctuation(&self, state: &FieldState) -> Vec<C64> {
        let rot = C64::from_polar(1.0, -self.pw.omega * state.t);
        state
            .u
            .iter()
            .zip(&self.dephase)
            .map(|(u, e)| u * e * rot - 1.0)
            .collect()
    }

    pub fn record(&self, state: &FieldState, trace: &mut MonitorTrace) {
        let vol = torus_volume(state.d);
        let u = self.fluctuation(state);
        let uh = self.grid.spectrum(&u);
        let zero = self.grid.index_of(&Mode::zero(state.d));
        let nonzero: f64 = uh
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != zero)
            .map(|(_, v)| v.norm_sqr())
            .sum();
        let fluct_nonzero = (vol * nonzero).sqrt();
        if self.light {
            let nan = f64::NAN;
            let mass = 0.5 * self.grid.l2_sq(&state.u);
            trace.push_row([
                state.t,
                nan,
                nan,
                mass,
                nan,
                fluct_nonzero,
                nan,
                nan,
                nan,
                nan,
                nan,
            ]);
            return;
        }
        let ledger = EnergyLedger::compute_on(self.grid, state, self.spec);
        let h1 = (vol
            * uh
                .iter()
                .zip(&self.grid.k2)
                .map(|(v, k2)| (1.0 + k2) * v.norm_sqr())
                .sum::<f64>())
        .sqrt();
        let e0 = e0_functional(self.grid, &uh, self.spec);
        let (rem, bound) = match (self.spec.c.finite(), self.c_f) {
            (Some(c), Some(cf)) => {
                let (f, x2) = self.remainder(state, &u, c);
                (f, cf * x2)
            }
            _ => (f64::NAN, f64::NAN),
        };
        trace.push_row([
            state.t,
            ledger.h_sw.unwrap_or(f64::NAN),
            ledger.h_ha,
            ledger.l2_mass,
            h1,
            fluct_nonzero,
            e0,
            ledger.momentum[0],
            ledger.momentum[1],
            rem,
            bound,
        ]);
    }

    /// (||F(X)||, ||X||^2) with F the quadratic part of the fluctuation vector field.
    fn remainder(&self, state: &FieldState, u: &[C64], c: f64) -> (f64, f64) {
        let spec = self.spec;
        let vol = torus_volume(state.d);
        let t = spec.table();
        let mut phi = potential_modes(spec, &self.layout, state);
        let zero = Mode::zero(state.d);
        let s0 = spec.sigma1.coeff(&zero);
        let phi_star: f64 = t.a.iter().zip(&self.pw.psi_star).map(|(a, p)| a * p).sum::<f64>() * vol * s0;
        for (p, m) in phi.iter_mut().zip(&self.layout.modes) {
            if m.is_zero() {
                *p -= phi_star;
            }
        }
        let coeffs: Vec<(Mode, C64)> = self.layout.modes.iter().copied().zip(phi).collect();
        let phi_x = self.grid.synthesize_real(&coeffs);
        let g = spec.gamma;
        let f_u: f64 = phi_x
            .iter()
            .zip(u)
            .map(|(p, v)| (g * p * v).norm_sqr())
            .sum::<f64>()
            * vol
            / u.len() as f64;
        let rho2 = self.grid.density_spectrum(u);
        let s2l2 = t.sigma2_l2();
        let f_w: f64 = self
            .layout
            .grid_idx
            .iter()
            .zip(&self.layout.sigma)
            .map(|(&gi, &s)| vol * vol * s * s * rho2[gi].norm_sqr())
            .sum::<f64>()
            * vol
            * c
            * c
            * g
            * g
            * s2l2
            * s2l2;
        let mut wave = 0.0;
        let zi = state.wave_index(&zero).unwrap();
        for mi in 0..state.wave_modes().len() {
            for j in 0..state.n_xi {
                let k = mi * state.n_xi + j;
                let mut psi = state.phi_hat[k];
                if mi == zi {
                    psi -= self.pw.psi_star[j];
                }
                let dpsi = psi_dot_from_pi(state.pi_hat[k], c);
                wave += t.measure[j] * (t.r[j] * t.r[j] * psi.norm_sqr() + dpsi.norm_sqr() / (c * c));
            }
        }
        let x2 = self.grid.l2_sq(u) + vol * wave;
        ((f_u + f_w).sqrt(), x2)
    }
}

/// E_0(u) = 1/2 int |grad u|^2 - (gamma^2 kappa / 2) int Sigma*(u + conj u)(u + conj u),
/// given the spectrum of u.
pub fn e0_functional(grid: &TorusGrid, uh: &[C64], spec: &CouplingSpec) -> f64 {
    let vol = torus_volume(grid.d);
    let grad: f64 = uh
        .iter()
        .zip(&grid.k2)
        .map(|(v, k2)| k2 * v.norm_sqr())
        .sum::<f64>();
    let mut pot = 0.0;
    for (m, _) in spec.sigma1.support() {
        if !grid.resolves(&m) {
            continue;
        }
        let a = uh[grid.index_of(&m)];
        let b = uh[grid.index_of(&m.neg())];
        let q = (a + b.conj()) * 0.5;
        pot += 2.0 * spec.mode_coupling(&m) * q.norm_sqr();
    }
    vol * (0.5 * grad - pot)
}
