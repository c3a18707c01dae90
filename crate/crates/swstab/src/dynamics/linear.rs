//! Linearized propagators around a plane wave.
//!
//! The fluctuation is u = q + i p with q, p real; (Q_m, P_m) are the Fourier
//! coefficients of q and p.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::coupling::CouplingSpec;
use crate::error::{Error, Result};
use crate::modes::Mode;
use crate::torus_volume;

use super::field::NodeRotation;
use super::state::psi_dot_from_pi;

/// (Q_m, P_m) for every mode of a band-limited linear Hartree fluctuation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearHartreeState {
    pub t: f64,
    pub k: Mode,
    pub modes: Vec<Mode>,
    pub q: Vec<C64>,
    pub p: Vec<C64>,
}

/// Splits complex coefficients w_m of u into (Q_m, P_m) over the symmetric closure of the modes.
fn split_qp(w: &[(Mode, C64)]) -> (Vec<Mode>, Vec<C64>, Vec<C64>) {
    let mut modes: Vec<Mode> = Vec::new();
    for (m, _) in w {
        for mm in [*m, m.neg()] {
            if !modes.contains(&mm) {
                modes.push(mm);
            }
        }
    }
    modes.sort();
    let get = |m: &Mode| -> C64 {
        w.iter()
            .filter(|(mm, _)| mm == m)
            .map(|(_, v)| *v)
            .sum()
    };
    let mut q = Vec::with_capacity(modes.len());
    let mut p = Vec::with_capacity(modes.len());
    for m in &modes {
        let a = get(m);
        let b = get(&m.neg()).conj();
        q.push((a + b) * 0.5);
        p.push((a - b) / C64::new(0.0, 2.0));
    }
    (modes, q, p)
}

impl LinearHartreeState {
    pub fn from_coefficients(k: Mode, w: &[(Mode, C64)]) -> Self {
        let (modes, q, p) = split_qp(w);
        LinearHartreeState {
            t: 0.0,
            k,
            modes,
            q,
            p,
        }
    }

    pub fn single(k: Mode, m: Mode, q: C64, p: C64) -> Self {
        LinearHartreeState {
            t: 0.0,
            k,
            modes: vec![m],
            q: vec![q],
            p: vec![p],
        }
    }

    /// u_m = Q_m + i P_m.
    pub fn coefficients(&self) -> Vec<(Mode, C64)> {
        self.modes
            .iter()
            .zip(self.q.iter().zip(&self.p))
            .map(|(m, (q, p))| (*m, q + C64::i() * p))
            .collect()
    }

    pub fn is_zero_mean(&self) -> bool {
        self.modes
            .iter()
            .zip(self.q.iter().zip(&self.p))
            .all(|(m, (q, p))| !m.is_zero() || (q.norm() == 0.0 && p.norm() == 0.0))
    }

    /// ||u||_{H1}.
    pub fn h1_norm(&self, d: usize) -> f64 {
        let s: f64 = self
            .modes
            .iter()
            .zip(self.q.iter().zip(&self.p))
            .map(|(m, (q, p))| (1.0 + m.norm2() as f64) * (q.norm_sqr() + p.norm_sqr()))
            .sum();
        (torus_volume(d) * s).sqrt()
    }

    /// E_0 = (2 pi)^d sum_m [ m^2/2 (|Q_m|^2 + |P_m|^2) - 2 gamma^2 kappa (2 pi)^{2d} sigma_{1,m}^2 |Q_m|^2 ].
    pub fn e0(&self, spec: &CouplingSpec) -> f64 {
        let s: f64 = self
            .modes
            .iter()
            .zip(self.q.iter().zip(&self.p))
            .map(|(m, (q, p))| {
                0.5 * m.norm2() as f64 * (q.norm_sqr() + p.norm_sqr())
                    - 2.0 * spec.mode_coupling(m) * q.norm_sqr()
            })
            .sum();
        torus_volume(spec.d) * s
    }

    /// 2 sqrt(E_0 / (1 - 4 gamma^2 kappa ||sigma_1||_{L1}^2)), or None outside smallness.
    pub fn h1_bound(&self, spec: &CouplingSpec) -> Option<f64> {
        let margin = spec.constants().margin;
        let e0 = self.e0(spec);
        (margin > 0.0 && e0 >= 0.0).then(|| 2.0 * (e0 / margin).sqrt())
    }
}

/// exp(t [[0, a], [b, 0]]) = [[C, a S], [b S, C]].
fn cosh_sinh(a: f64, b: f64, t: f64) -> (f64, f64) {
    let ab = a * b;
    if ab > 0.0 {
        let mu = ab.sqrt();
        ((mu * t).cosh(), (mu * t).sinh() / mu)
    } else if ab < 0.0 {
        let nu = (-ab).sqrt();
        ((nu * t).cos(), (nu * t).sin() / nu)
    } else {
        (1.0, t)
    }
}

/// Applies exp(t L_{k,m}) to (q, p); exact, including the Jordan block at m = 0.
pub fn propagate_hartree_mode(k: &Mode, m: &Mode, spec: &CouplingSpec, t: f64, q: C64, p: C64) -> (C64, C64) {
    let m2 = m.norm2() as f64;
    let a = 0.5 * m2;
    let b = -0.5 * m2 + 2.0 * spec.mode_coupling(m);
    let shift = C64::from_polar(1.0, -(k.dot(m) as f64) * t);
    let (c, s) = cosh_sinh(a, b, t);
    ((q * c + p * (a * s)) * shift, (q * (b * s) + p * c) * shift)
}

/// Samples the exact linearized Hartree flow at `samples + 1` equispaced times in [0, t_final].
pub fn evolve_linear_hartree(
    w0: &LinearHartreeState,
    t_final: f64,
    samples: usize,
    spec: &CouplingSpec,
) -> Result<Vec<LinearHartreeState>> {
    if !(t_final >= 0.0) || samples == 0 {
        return Err(Error::invalid("need t_final >= 0 and samples >= 1"));
    }
    let mut out = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        let t = t_final * i as f64 / samples as f64;
        let mut st = w0.clone();
        st.t = w0.t + t;
        for (j, m) in w0.modes.iter().enumerate() {
            let (q, p) = propagate_hartree_mode(&w0.k, m, spec, t, w0.q[j], w0.p[j]);
            st.q[j] = q;
            st.p[j] = p;
        }
        out.push(st);
    }
    Ok(out)
}

/// Linearized Schrodinger-wave fluctuation: (Q_m, P_m) plus psi_hat and d/dt psi_hat per radial node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSwState {
    pub t: f64,
    pub k: Mode,
    pub modes: Vec<Mode>,
    pub q: Vec<C64>,
    pub p: Vec<C64>,
    /// Layout [mode][node].
    pub psi: Vec<C64>,
    pub psi_dot: Vec<C64>,
    pub n_xi: usize,
}

impl LinearSwState {
    /// Fluctuation with the given u coefficients and zero field.
    pub fn from_coefficients(k: Mode, w: &[(Mode, C64)], n_xi: usize) -> Self {
        let (modes, q, p) = split_qp(w);
        let nm = modes.len();
        LinearSwState {
            t: 0.0,
            k,
            modes,
            q,
            p,
            psi: vec![C64::new(0.0, 0.0); nm * n_xi],
            psi_dot: vec![C64::new(0.0, 0.0); nm * n_xi],
            n_xi,
        }
    }

    pub fn is_zero_mean(&self) -> bool {
        self.modes.iter().enumerate().all(|(i, m)| {
            !m.is_zero()
                || (self.q[i].norm() == 0.0
                    && self.p[i].norm() == 0.0
                    && self.psi[i * self.n_xi..(i + 1) * self.n_xi].iter().all(|v| v.norm() == 0.0)
                    && self.psi_dot[i * self.n_xi..(i + 1) * self.n_xi].iter().all(|v| v.norm() == 0.0))
        })
    }

    pub fn h1_norm(&self, d: usize) -> f64 {
        let s: f64 = self
            .modes
            .iter()
            .zip(self.q.iter().zip(&self.p))
            .map(|(m, (q, p))| (1.0 + m.norm2() as f64) * (q.norm_sqr() + p.norm_sqr()))
            .sum();
        (torus_volume(d) * s).sqrt()
    }

    /// E = 1/2 ||grad u||^2 + 1/2 int int (|psi_t|^2/c^2 + |grad_z psi|^2) + gamma int Phi (u + conj u).
    /// Conserved by the k = 0 flow.
    pub fn energy(&self, spec: &CouplingSpec) -> Result<f64> {
        let c = spec.finite_c()?;
        let t = spec.table();
        let vol = torus_volume(spec.d);
        let mut e = 0.0;
        for (i, m) in self.modes.iter().enumerate() {
            e += 0.5 * m.norm2() as f64 * (self.q[i].norm_sqr() + self.p[i].norm_sqr());
            let psi = &self.psi[i * self.n_xi..(i + 1) * self.n_xi];
            let dpsi = &self.psi_dot[i * self.n_xi..(i + 1) * self.n_xi];
            for j in 0..self.n_xi {
                e += 0.5
                    * t.measure[j]
                    * (dpsi[j].norm_sqr() / (c * c) + t.r[j] * t.r[j] * psi[j].norm_sqr());
            }
            let phi = potential(spec, m, psi);
            e += 2.0 * spec.gamma * (phi * self.q[i].conj()).re;
        }
        Ok(vol * e)
    }

    /// 2 sqrt(E / (1 - 4 gamma^2 kappa ||sigma_1||_{L1}^2)), or None outside smallness.
    pub fn h1_bound(&self, spec: &CouplingSpec) -> Result<Option<f64>> {
        let margin = spec.constants().margin;
        let e = self.energy(spec)?;
        Ok((margin > 0.0 && e >= 0.0).then(|| 2.0 * (e / margin).sqrt()))
    }
}

/// Phi_m = (2 pi)^d sigma_{1,m} sum_j a_j psi_j.
fn potential(spec: &CouplingSpec, m: &Mode, psi: &[C64]) -> C64 {
    let s = spec.sigma1.coeff(m);
    if s == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let acc: C64 = psi.iter().zip(&spec.table().a).map(|(p, a)| p * a).sum();
    acc * (torus_volume(spec.d) * s)
}

/// Strang splitting of the linearized coupled flow: exact free Schrodinger half steps
/// around an exact joint step of the wave field (with frozen q) and the p update.
pub fn evolve_linear_sw(
    w0: &LinearSwState,
    t_final: f64,
    dt: f64,
    sample_every: usize,
    spec: &CouplingSpec,
) -> Result<Vec<LinearSwState>> {
    let c = spec.finite_c()?;
    if !(dt > 0.0) {
        return Err(Error::invalid(format!("dt must be > 0, got {dt}")));
    }
    if w0.n_xi != spec.table().len() {
        return Err(Error::invalid("radial node count differs from the coupling quadrature"));
    }
    let steps = (t_final / dt).round() as usize;
    let rot = NodeRotation::new(spec.table(), c, dt);
    let vol = torus_volume(spec.d);
    let t = spec.table();
    let mut st = w0.clone();
    let mut out = vec![st.clone()];
    let n = st.n_xi;
    let mut forcing = vec![0.0; n];
    let mut integral = vec![C64::new(0.0, 0.0); n];
    for step in 1..=steps {
        for (i, m) in st.modes.iter().enumerate() {
            let (q, p) = free_half(&st.k, m, 0.5 * dt, st.q[i], st.p[i]);
            st.q[i] = q;
            st.p[i] = p;
        }
        for (i, m) in st.modes.clone().iter().enumerate() {
            let s = spec.sigma1.coeff(m);
            let src = -spec.gamma * c * c * vol * s;
            for j in 0..n {
                forcing[j] = src * t.shat[j];
            }
            let qi = st.q[i] * 2.0;
            let (psi, dpsi) = (
                &mut st.psi[i * n..(i + 1) * n],
                &mut st.psi_dot[i * n..(i + 1) * n],
            );
            rot.advance(psi, dpsi, &forcing, qi, &mut integral);
            if s != 0.0 {
                let phi_bar: C64 = integral.iter().zip(&t.a).map(|(v, a)| v * a).sum::<C64>() * (vol * s);
                st.p[i] -= phi_bar * spec.gamma;
            }
        }
        for (i, m) in st.modes.iter().enumerate() {
            let (q, p) = free_half(&st.k, m, 0.5 * dt, st.q[i], st.p[i]);
            st.q[i] = q;
            st.p[i] = p;
        }
        st.t = w0.t + step as f64 * dt;
        if step == steps || (sample_every > 0 && step % sample_every == 0) {
            out.push(st.clone());
        }
    }
    Ok(out)
}

fn free_half(k: &Mode, m: &Mode, tau: f64, q: C64, p: C64) -> (C64, C64) {
    let a = 0.5 * m.norm2() as f64;
    let (c, s) = cosh_sinh(a, -a, tau);
    let shift = C64::from_polar(1.0, -(k.dot(m) as f64) * tau);
    ((q * c + p * (a * s)) * shift, (q * (-a * s) + p * c) * shift)
}

/// Mode-0 samples (t, Q_0, P_0).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Mode0Trajectory {
    pub t: Vec<f64>,
    pub q: Vec<C64>,
    pub p: Vec<C64>,
}

impl Mode0Trajectory {
    /// Least-squares slope of Re P_0 over t in [t0, t1].
    pub fn slope(&self, t0: f64, t1: f64) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .t
            .iter()
            .zip(&self.p)
            .filter(|(t, _)| **t >= t0 && **t <= t1)
            .map(|(t, p)| (*t, p.re))
            .collect();
        ols_slope(&pts)
    }
}

pub(crate) fn ols_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Mode-0 linearized coupled system, solved node by node in closed form:
/// Q_0 is constant, each psi_j is a driven oscillator and P_0 integrates -gamma Phi_0.
pub fn evolve_linear_sw_mode0(
    q0: C64,
    p0: C64,
    phi0_hat: &[C64],
    pi0_hat: &[C64],
    t_final: f64,
    samples: usize,
    spec: &CouplingSpec,
) -> Result<Mode0Trajectory> {
    let c = spec.finite_c()?;
    let t = spec.table();
    if phi0_hat.len() != t.len() || pi0_hat.len() != t.len() {
        return Err(Error::invalid("initial field must have one value per radial node"));
    }
    if samples == 0 {
        return Err(Error::invalid("samples must be >= 1"));
    }
    let mean = spec.sigma1.mean();
    let g = spec.gamma;
    // Per node: psi_eq, delta, psi_dot0 and omega.
    let nodes: Vec<(C64, C64, C64, f64, f64)> = (0..t.len())
        .map(|j| {
            let w = c * t.r[j];
            let force = q0 * (-g * c * c * t.shat[j] * mean * 2.0);
            let eq = force / (w * w);
            (eq, phi0_hat[j] - eq, psi_dot_from_pi(pi0_hat[j], c), w, t.a[j])
        })
        .collect();
    let mut out = Mode0Trajectory::default();
    for i in 0..=samples {
        let time = t_final * i as f64 / samples as f64;
        let mut acc = C64::new(0.0, 0.0);
        for &(eq, delta, dpsi, w, a) in &nodes {
            let h = 0.5 * w * time;
            let one_minus_cos = 2.0 * h.sin() * h.sin();
            acc += (eq * time + delta * ((w * time).sin() / w) + dpsi * (one_minus_cos / (w * w))) * a;
        }
        out.t.push(time);
        out.q.push(q0);
        out.p.push(p0 - acc * (g * mean));
    }
    Ok(out)
}
