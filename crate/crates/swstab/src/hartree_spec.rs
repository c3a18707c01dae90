//! Mode-by-mode linearized analysis of the Hartree equation around a plane wave.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::coupling::{CouplingConstants, CouplingSpec, Sigma1Spec};
use crate::modes::{display_order, Mode};
use crate::report::StabilityReport;
use crate::torus_volume;

/// The 2x2 block acting on (Q_m, P_m).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HartreeModeMatrix {
    pub m: Mode,
    pub entries: [[C64; 2]; 2],
}

impl HartreeModeMatrix {
    pub fn trace(&self) -> C64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn det(&self) -> C64 {
        self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let e = &self.entries;
        [
            e[0][0] * v[0] + e[0][1] * v[1],
            e[1][0] * v[0] + e[1][1] * v[1],
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HartreeModeVerdict {
    pub m: Mode,
    pub lambda_plus: C64,
    pub lambda_minus: C64,
    pub stable: bool,
    /// 4 gamma^2 kappa (2 pi)^{2d} sigma_{1,m}^2 / m^2; absent for m = 0.
    pub criterion_value: Option<f64>,
}

/// 4 gamma^2 kappa (2 pi)^{2d} sigma_{1,m}^2.
fn coupling_strength(m: &Mode, constants: &CouplingConstants, sigma1: &Sigma1Spec) -> f64 {
    let v = torus_volume(sigma1.d());
    let s = sigma1.coeff(m);
    4.0 * constants.gamma * constants.gamma * constants.kappa * v * v * s * s
}

pub fn mode_matrix(
    k: &Mode,
    m: &Mode,
    constants: &CouplingConstants,
    sigma1: &Sigma1Spec,
) -> HartreeModeMatrix {
    let diag = C64::new(0.0, -(k.dot(m) as f64));
    let m2 = m.norm2() as f64;
    let lower = -0.5 * m2 + 0.5 * coupling_strength(m, constants, sigma1);
    HartreeModeMatrix {
        m: *m,
        entries: [
            [diag, C64::new(0.5 * m2, 0.0)],
            [C64::new(lower, 0.0), diag],
        ],
    }
}

/// Eigenvalues of a 2x2 complex matrix from its characteristic polynomial.
pub fn eigenvalues_direct(mat: &HartreeModeMatrix) -> [C64; 2] {
    let tr = mat.trace();
    let det = mat.det();
    let disc = (tr * tr - 4.0 * det).sqrt();
    [(tr + disc) / 2.0, (tr - disc) / 2.0]
}

pub fn mode_eigenvalues(
    k: &Mode,
    m: &Mode,
    constants: &CouplingConstants,
    sigma1: &Sigma1Spec,
) -> HartreeModeVerdict {
    let shift = C64::new(0.0, -(k.dot(m) as f64));
    if m.is_zero() {
        return HartreeModeVerdict {
            m: *m,
            lambda_plus: shift,
            lambda_minus: shift,
            stable: true,
            criterion_value: None,
        };
    }
    let m2 = m.norm2() as f64;
    let strength = coupling_strength(m, constants, sigma1);
    let x = strength - m2;
    let root = if x >= 0.0 {
        C64::new(x.sqrt(), 0.0)
    } else {
        C64::new(0.0, (-x).sqrt())
    };
    let half = 0.5 * m.norm();
    let criterion = strength / m2;
    HartreeModeVerdict {
        m: *m,
        lambda_plus: shift + root * half,
        lambda_minus: shift - root * half,
        stable: criterion <= 1.0,
        criterion_value: Some(criterion),
    }
}

/// Kernel direction of the nilpotent mode-0 block.
pub fn mode0_kernel_direction() -> [C64; 2] {
    [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
}

/// Iterates |m|_inf <= m_max; modes outside the sigma_1 band are the free case.
pub fn spectrum_report_hartree(k: &Mode, m_max: i64, spec: &CouplingSpec) -> StabilityReport {
    let consts = spec.constants();
    let modes: Vec<HartreeModeVerdict> = Mode::box_iter(spec.d, m_max)
        .iter()
        .map(|m| mode_eigenvalues(k, m, &consts, &spec.sigma1))
        .collect();
    let mut unstable: Vec<Mode> = modes.iter().filter(|v| !v.stable).map(|v| v.m).collect();
    unstable.sort_by(display_order);
    let stable = unstable.is_empty();
    StabilityReport {
        system: "hartree".into(),
        k: *k,
        spectrally_stable: stable,
        verdict: if stable {
            "spectrally stable".into()
        } else {
            "spectrally unstable".into()
        },
        in_proven_regime: true,
        unstable_modes: unstable,
        hartree_modes: modes,
        counts: None,
        roots: vec![],
        a_star: None,
    }
}

/// S = 2 (2 pi)^{2d} gamma^2 kappa sigma_{1,0}^2, the lower-left entry of the mode-0 block.
pub fn mode0_slope(spec: &CouplingSpec) -> f64 {
    2.0 * spec.mode_coupling(&Mode::zero(spec.d))
}

/// (Q_0(t), P_0(t)) = (Q_0, P_0 + t S Q_0).
pub fn linearized_growth_mode0(spec: &CouplingSpec, q0: C64, p0: C64, t: f64) -> (C64, C64) {
    (q0, p0 + q0 * (t * mode0_slope(spec)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoercivityReport {
    /// (m, 1 - 4 gamma^2 kappa (2 pi)^{2d} sigma_{1,m}^2 / m^2) for m != 0.
    pub margins: Vec<(Mode, f64)>,
    /// max_m (1 - margin_m).
    pub delta: f64,
    pub coercive: bool,
}

pub fn coercivity_margins_hartree(m_max: i64, spec: &CouplingSpec) -> CoercivityReport {
    let consts = spec.constants();
    let margins: Vec<(Mode, f64)> = Mode::box_iter(spec.d, m_max)
        .into_iter()
        .filter(|m| !m.is_zero())
        .map(|m| {
            let crit = coupling_strength(&m, &consts, &spec.sigma1) / m.norm2() as f64;
            (m, 1.0 - crit)
        })
        .collect();
    let delta = margins.iter().map(|(_, g)| 1.0 - g).fold(0.0, f64::max);
    CoercivityReport {
        margins,
        delta,
        coercive: delta < 1.0,
    }
}
