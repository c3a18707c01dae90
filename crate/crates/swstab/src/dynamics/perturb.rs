//! Initial data near a plane wave.

use num_complex::Complex64 as C64;

use crate::coupling::CouplingSpec;
use crate::error::{Error, Result};
use crate::modes::Mode;
use crate::planewave::{plane_wave_state, PlaneWave};
use crate::sw_spec::UnstableRoot;
use crate::torus_volume;

use super::state::{pi_from_psi_dot, FieldState, GridSpec};
use super::torus::TorusGrid;

/// Zero-mean fluctuation w in coefficient form.
///
/// d = 1: w = cos x + (i/2) sin 2x. d = 2: w = cos x_1 + (i/2) sin(x_1 + x_2).
pub fn reference_perturbation(d: usize) -> Vec<(Mode, C64)> {
    let (m1, m2) = if d == 1 {
        (Mode::one_d(1), Mode::one_d(2))
    } else {
        (Mode::new(&[1, 0]), Mode::new(&[1, 1]))
    };
    vec![
        (m1, C64::new(0.5, 0.0)),
        (m1.neg(), C64::new(0.5, 0.0)),
        (m2, C64::new(0.25, 0.0)),
        (m2.neg(), C64::new(-0.25, 0.0)),
    ]
}

/// Plane-wave state with U = e^{i k.x} (1 + eps w(x)); the wave field stays at Psi*.
pub fn perturbed_plane_wave(
    spec: &CouplingSpec,
    grid: &GridSpec,
    k: Mode,
    eps: f64,
    w: &[(Mode, C64)],
) -> Result<FieldState> {
    let pw = PlaneWave::new(spec, k)?;
    let mut st = plane_wave_state(&pw, spec, grid)?;
    let tg = TorusGrid::new(spec.d, grid.n_x);
    let mut wx = vec![C64::new(0.0, 0.0); tg.len];
    for (m, v) in w {
        if !tg.resolves(m) {
            return Err(Error::invalid(format!("perturbation mode {m} is not resolved")));
        }
        wx[tg.index_of(m)] += v;
    }
    tg.inverse(&mut wx);
    for (u, wv) in st.u.iter_mut().zip(&wx) {
        *u *= 1.0 + wv * eps;
    }
    Ok(st)
}

/// Plane wave plus the real part of the eigenvector of a located root (m, lambda).
///
/// The fluctuation is scaled so that its nonzero-mode L2 norm equals
/// `amplitude * ||1||_{L2}`.
pub fn eigenvector_perturbation(
    spec: &CouplingSpec,
    grid: &GridSpec,
    k: Mode,
    root: &UnstableRoot,
    amplitude: f64,
) -> Result<FieldState> {
    let c = spec.finite_c()?;
    let m = root.m;
    let lam = root.lambda;
    let pw = PlaneWave::new(spec, k)?;
    let mut st = plane_wave_state(&pw, spec, grid)?;
    let tg = TorusGrid::new(spec.d, grid.n_x);
    if !tg.resolves(&m) || st.wave_index(&m).is_none() {
        return Err(Error::invalid(format!("mode {m} is outside the grid or the wave box")));
    }
    let m2 = m.norm2() as f64;
    let q = C64::new(1.0, 0.0);
    let p = (lam + C64::new(0.0, k.dot(&m) as f64)) * q * (2.0 / m2);
    let u_m = q + C64::i() * p;
    let u_neg = q.conj() + C64::i() * p.conj();
    let eps = amplitude / (u_m.norm_sqr() + u_neg.norm_sqr()).sqrt();
    let mut wx = vec![C64::new(0.0, 0.0); tg.len];
    wx[tg.index_of(&m)] += u_m * eps;
    wx[tg.index_of(&m.neg())] += u_neg * eps;
    tg.inverse(&mut wx);
    for (u, wv) in st.u.iter_mut().zip(&wx) {
        *u *= 1.0 + wv;
    }
    let t = spec.table();
    let vol = torus_volume(spec.d);
    let s = spec.sigma1.coeff(&m);
    let n = st.n_xi;
    let (im, ineg) = (st.wave_index(&m).unwrap(), st.wave_index(&m.neg()).unwrap());
    let s_arg = lam * lam / (c * c);
    for j in 0..n {
        let psi = q * (-2.0 * spec.gamma * t.shat[j] * vol * s) / (s_arg + t.r[j] * t.r[j]) * eps;
        st.phi_hat[im * n + j] += psi;
        st.phi_hat[ineg * n + j] += psi.conj();
        st.pi_hat[im * n + j] += pi_from_psi_dot(psi * lam, c);
        st.pi_hat[ineg * n + j] += pi_from_psi_dot((psi * lam).conj(), c);
    }
    Ok(st)
}
