//! Form functions, coupling constants and the memory kernel.
//!
//! Conventions: torus Fourier coefficients are f_m = (2 pi)^{-d} int f e^{-i m.x},
//! z-transforms are normalized so that int g dz = int g_hat dxi / (2 pi)^n, and
//! every radial xi-integral is int dxi = |S^{n-1}| int r^{n-1} dr.

mod quadrature;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::Mode;
use crate::torus_volume;

pub use quadrature::{gauss_legendre, RadialQuadrature};

/// Wave speed: a positive number, or the Hartree limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Speed {
    Finite(f64),
    Infinite,
}

impl Speed {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Speed::Finite(c) => Some(*c),
            Speed::Infinite => None,
        }
    }
}

impl Serialize for Speed {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Speed::Finite(c) => s.serialize_f64(*c),
            Speed::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for Speed {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(c) => Ok(Speed::Finite(c)),
            Raw::Int(c) => Ok(Speed::Finite(c as f64)),
            Raw::Text(t) if t == "infinite" => Ok(Speed::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a positive number or \"infinite\", got \"{t}\""
            ))),
        }
    }
}

/// sigma_1 given by finitely many real, even Fourier coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Sigma1Spec {
    d: usize,
    coeffs: BTreeMap<Mode, f64>,
}

impl Sigma1Spec {
    /// Builds the coefficient table. A mode given without its mirror image gets
    /// the mirror filled in; conflicting mirror values are rejected.
    pub fn new(d: usize, entries: &[(Mode, f64)]) -> Result<Self> {
        if !(1..=2).contains(&d) {
            return Err(Error::invalid(format!("d = {d}: only d = 1 or 2 supported")));
        }
        let mut coeffs = BTreeMap::new();
        for &(m, v) in entries {
            if m.d != d {
                return Err(Error::invalid(format!("mode {m} has dimension {} != d = {d}", m.d)));
            }
            if !v.is_finite() {
                return Err(Error::invalid(format!("sigma1 coefficient at {m} is not finite")));
            }
            for key in [m, m.neg()] {
                if let Some(&old) = coeffs.get(&key) {
                    if old != v {
                        return Err(Error::invalid(format!(
                            "sigma1 coefficients at {m} and {} must be equal (got {old} and {v})",
                            m.neg()
                        )));
                    }
                }
                coeffs.insert(key, v);
            }
        }
        coeffs.retain(|_, v| *v != 0.0);
        let s = Sigma1Spec { d, coeffs };
        s.validate()?;
        Ok(s)
    }

    /// (1 + cos x)/(2 pi) in d = 1; the tensor product of that profile in d = 2.
    pub fn cosine(d: usize) -> Result<Self> {
        let base = [(0i64, 1.0 / (2.0 * PI)), (1, 1.0 / (4.0 * PI)), (-1, 1.0 / (4.0 * PI))];
        let mut entries = Vec::new();
        if d == 1 {
            for (m, v) in base {
                entries.push((Mode::one_d(m), v));
            }
        } else {
            for (a, va) in base {
                for (b, vb) in base {
                    entries.push((Mode::new(&[a, b]), va * vb));
                }
            }
        }
        Sigma1Spec::new(d, &entries)
    }

    fn validate(&self) -> Result<()> {
        if self.coeff(&Mode::zero(self.d)) == 0.0 {
            return Err(Error::invalid("sigma1 must have nonzero mean (sigma_{1,0} != 0)"));
        }
        let n = (8 * self.band_limit() as usize + 64).next_power_of_two();
        let min = self.grid_values(n).into_iter().fold(f64::INFINITY, f64::min);
        let scale = self.coeffs.values().map(|v| v.abs()).sum::<f64>();
        if min < -1e-12 * scale {
            return Err(Error::invalid(format!(
                "sigma1 must be nonnegative; reconstructed minimum {min:e}"
            )));
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeff(&self, m: &Mode) -> f64 {
        self.coeffs.get(m).copied().unwrap_or(0.0)
    }

    /// Nonzero coefficients, sorted by mode.
    pub fn support(&self) -> Vec<(Mode, f64)> {
        self.coeffs.iter().map(|(m, v)| (*m, *v)).collect()
    }

    pub fn band_limit(&self) -> i64 {
        self.coeffs.keys().map(|m| m.linf()).max().unwrap_or(0)
    }

    /// <sigma_1> = (2 pi)^d sigma_{1,0}.
    pub fn mean(&self) -> f64 {
        torus_volume(self.d) * self.coeff(&Mode::zero(self.d))
    }

    /// Values of sigma_1 on the uniform n^d grid, row-major.
    pub fn grid_values(&self, n: usize) -> Vec<f64> {
        let h = 2.0 * PI / n as f64;
        let total = n.pow(self.d as u32);
        (0..total)
            .map(|idx| {
                let x = [h * (idx % n) as f64, h * (idx / n) as f64];
                self.coeffs
                    .iter()
                    .map(|(m, v)| v * (m.c[0] as f64 * x[0] + m.c[1] as f64 * x[1]).cos())
                    .sum()
            })
            .collect()
    }

    /// L1 norm by the trapezoid rule, exact for the band-limited nonnegative profile.
    pub fn l1_norm(&self) -> f64 {
        let n = (8 * self.band_limit() as usize + 64).next_power_of_two();
        let cell = torus_volume(self.d) / n.pow(self.d as u32) as f64;
        self.grid_values(n).iter().map(|v| v.abs()).sum::<f64>() * cell
    }

    /// L2 norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        (torus_volume(self.d) * self.coeffs.values().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// sum |sigma_{1,m}|, an upper bound for the sup norm (attained for cosine-type profiles).
    pub fn linf_bound(&self) -> f64 {
        self.coeffs.values().map(|v| v.abs()).sum()
    }
}

/// Radial profile of sigma_2_hat.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Sigma2Kind {
    /// sigma_2(z) = amplitude * exp(-|z|^2 / (2 width^2)).
    Gaussian {
        width: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Tabulated sigma_2_hat(r), linearly interpolated; nodes increasing from 0.
    RadialTable { nodes: Vec<f64>, values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

/// sigma_2 together with the radial quadrature used for every xi-integral.
#[derive(Clone, Debug, PartialEq)]
pub struct Sigma2Spec {
    pub kind: Sigma2Kind,
    pub quad: RadialQuadrature,
    pub tail_tol: f64,
}

impl Sigma2Spec {
    pub const DEFAULT_R_MAX: f64 = 12.0;
    pub const DEFAULT_N_XI: usize = 512;
    pub const DEFAULT_TAIL_TOL: f64 = 1e-16;

    pub fn new(kind: Sigma2Kind, r_max: f64, n_xi: usize, tail_tol: f64) -> Result<Self> {
        match &kind {
            Sigma2Kind::Gaussian { width, amplitude } => {
                if !(*width > 0.0 && width.is_finite() && amplitude.is_finite()) {
                    return Err(Error::invalid("gaussian sigma2 needs width > 0 and finite amplitude"));
                }
            }
            Sigma2Kind::RadialTable { nodes, values } => {
                if nodes.len() < 2 || nodes.len() != values.len() {
                    return Err(Error::invalid("radial table needs >= 2 nodes and matching values"));
                }
                if nodes[0] != 0.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::invalid("radial table nodes must start at 0 and increase"));
                }
                if *nodes.last().unwrap() < r_max {
                    return Err(Error::invalid("radial table must cover [0, r_max]"));
                }
            }
        }
        Ok(Sigma2Spec {
            kind,
            quad: RadialQuadrature::composite(r_max, n_xi)?,
            tail_tol,
        })
    }

    /// Unit-width Gaussian with the default quadrature.
    pub fn gaussian_default() -> Self {
        Sigma2Spec::new(
            Sigma2Kind::Gaussian {
                width: 1.0,
                amplitude: 1.0,
            },
            Self::DEFAULT_R_MAX,
            Self::DEFAULT_N_XI,
            Self::DEFAULT_TAIL_TOL,
        )
        .expect("default sigma2 is valid")
    }

    pub fn scaled(&self, a: f64) -> Self {
        let kind = match &self.kind {
            Sigma2Kind::Gaussian { width, amplitude } => Sigma2Kind::Gaussian {
                width: *width,
                amplitude: a * amplitude,
            },
            Sigma2Kind::RadialTable { nodes, values } => Sigma2Kind::RadialTable {
                nodes: nodes.clone(),
                values: values.iter().map(|v| a * v).collect(),
            },
        };
        Sigma2Spec {
            kind,
            quad: self.quad.clone(),
            tail_tol: self.tail_tol,
        }
    }

    /// sigma_2_hat(r) in wave dimension n.
    pub fn fourier(&self, n: usize, r: f64) -> f64 {
        match &self.kind {
            Sigma2Kind::Gaussian { width, amplitude } => {
                let w2 = width * width;
                amplitude * (2.0 * PI * w2).powf(n as f64 / 2.0) * (-0.5 * w2 * r * r).exp()
            }
            Sigma2Kind::RadialTable { nodes, values } => {
                if r >= *nodes.last().unwrap() {
                    return *values.last().unwrap();
                }
                let i = nodes.partition_point(|&x| x <= r).saturating_sub(1);
                let t = (r - nodes[i]) / (nodes[i + 1] - nodes[i]);
                values[i] * (1.0 - t) + values[i + 1] * t
            }
        }
    }

    /// |sigma_2_hat(R)|^2 / |sigma_2_hat(0)|^2 (0 for the zero profile).
    pub fn tail_bound(&self, n: usize) -> f64 {
        let s0 = self.fourier(n, 0.0);
        if s0 == 0.0 {
            return 0.0;
        }
        let sr = self.fourier(n, self.quad.r_max);
        (sr * sr) / (s0 * s0)
    }

    pub fn is_zero(&self) -> bool {
        self.quad.nodes.iter().all(|&r| self.fourier(3, r) == 0.0)
    }
}

/// |S^{n-1}| / (2 pi)^n.
pub fn radial_prefactor(n: usize) -> f64 {
    let nf = n as f64;
    let sphere = 2.0 * PI.powf(nf / 2.0) / gamma_fn(nf / 2.0);
    sphere / (2.0 * PI).powf(nf)
}

/// Gamma function at integer or half-integer arguments (all that radial_prefactor needs).
fn gamma_fn(x: f64) -> f64 {
    let twice = (2.0 * x).round() as i64;
    assert!(twice >= 1 && ((2.0 * x) - twice as f64).abs() < 1e-12);
    if twice % 2 == 0 {
        (1..(twice / 2)).map(|k| k as f64).product()
    } else {
        // Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
        let k = (twice - 1) / 2;
        let mut g = PI.sqrt();
        for j in 0..k {
            g *= j as f64 + 0.5;
        }
        g
    }
}

/// Per-node weights of the radial quadrature for a fixed (sigma_2, n).
///
/// With b_j = |S^{n-1}|/(2 pi)^n w_j r_j^{n-1} and s_j = sigma_2_hat(r_j):
/// a_j = b_j s_j pairs a field sample with sigma_2, g_j = a_j s_j is the
/// spectral density entering kappa, kappa_s and p.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialTable {
    pub n: usize,
    pub r: Vec<f64>,
    pub measure: Vec<f64>,
    pub shat: Vec<f64>,
    pub a: Vec<f64>,
    pub g: Vec<f64>,
}

impl RadialTable {
    pub fn new(spec: &Sigma2Spec, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid(format!(
                "wave dimension n = {n}: kappa diverges unless n >= 3"
            )));
        }
        let bound = spec.tail_bound(n);
        if bound > spec.tail_tol {
            return Err(Error::QuadratureTail {
                bound,
                tol: spec.tail_tol,
            });
        }
        let pref = radial_prefactor(n);
        let r = spec.quad.nodes.clone();
        let measure: Vec<f64> = r
            .iter()
            .zip(&spec.quad.weights)
            .map(|(&r, &w)| pref * w * r.powi(n as i32 - 1))
            .collect();
        let shat: Vec<f64> = r.iter().map(|&r| spec.fourier(n, r)).collect();
        let a: Vec<f64> = measure.iter().zip(&shat).map(|(b, s)| b * s).collect();
        let g: Vec<f64> = a.iter().zip(&shat).map(|(a, s)| a * s).collect();
        Ok(RadialTable {
            n,
            r,
            measure,
            shat,
            a,
            g,
        })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn kappa(&self) -> f64 {
        self.g.iter().zip(&self.r).map(|(g, r)| g / (r * r)).sum()
    }

    /// kappa_s and d kappa_s / ds; s may be any complex number off the negative real axis.
    pub fn kappa_s_with_derivative(&self, s: C64) -> (C64, C64) {
        let mut k = C64::new(0.0, 0.0);
        let mut dk = C64::new(0.0, 0.0);
        for (g, r) in self.g.iter().zip(&self.r) {
            let inv = 1.0 / (s + r * r);
            k += g * inv;
            dk -= g * inv * inv;
        }
        (k, dk)
    }

    /// p(tau) = int sin(tau |xi|)/|xi| |sigma_2_hat|^2 dxi/(2 pi)^n.
    pub fn p(&self, tau: f64) -> f64 {
        self.g
            .iter()
            .zip(&self.r)
            .map(|(g, r)| g * (tau * r).sin() / r)
            .sum()
    }

    /// int_0^T p(tau) d tau, integrated node by node.
    pub fn p_integral(&self, t: f64) -> f64 {
        self.g
            .iter()
            .zip(&self.r)
            .map(|(g, r)| {
                let h = 0.5 * t * r;
                // 1 - cos(tr) = 2 sin^2(tr/2), no cancellation for small tr.
                g * 2.0 * h.sin() * h.sin() / (r * r)
            })
            .sum()
    }

    /// ||sigma_2||_{L2(R^n)}.
    pub fn sigma2_l2(&self) -> f64 {
        self.measure
            .iter()
            .zip(&self.shat)
            .map(|(b, s)| b * s * s)
            .sum::<f64>()
            .sqrt()
    }
}

/// The physical problem.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSpec {
    pub d: usize,
    pub n: usize,
    pub gamma: f64,
    pub c: Speed,
    pub sigma1: Sigma1Spec,
    pub sigma2: Sigma2Spec,
    table: RadialTable,
}

impl CouplingSpec {
    pub fn new(
        d: usize,
        n: usize,
        gamma: f64,
        c: Speed,
        sigma1: Sigma1Spec,
        sigma2: Sigma2Spec,
    ) -> Result<Self> {
        if sigma1.d() != d {
            return Err(Error::invalid(format!(
                "sigma1 has dimension {} but d = {d}",
                sigma1.d()
            )));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma must be >= 0, got {gamma}")));
        }
        if let Speed::Finite(cv) = c {
            if !(cv > 0.0 && cv.is_finite()) {
                return Err(Error::invalid(format!("c must be > 0, got {cv}")));
            }
        }
        let table = RadialTable::new(&sigma2, n)?;
        if let Some(j) = table.shat.iter().position(|&s| s == 0.0) {
            return Err(Error::invalid(format!(
                "sigma2_hat vanishes at r = {} inside the quadrature range",
                table.r[j]
            )));
        }
        Ok(CouplingSpec {
            d,
            n,
            gamma,
            c,
            sigma1,
            sigma2,
            table,
        })
    }

    /// d = 1, n = 3, unit Gaussian sigma_2, sigma_1 = (1 + cos x)/(2 pi).
    pub fn reference(gamma: f64, c: Speed) -> Self {
        CouplingSpec::new(
            1,
            3,
            gamma,
            c,
            Sigma1Spec::cosine(1).expect("cosine profile is valid"),
            Sigma2Spec::gaussian_default(),
        )
        .expect("reference configuration is valid")
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        CouplingSpec {
            gamma,
            ..self.clone()
        }
    }

    pub fn with_c(&self, c: Speed) -> Self {
        CouplingSpec { c, ..self.clone() }
    }

    pub fn with_sigma1(&self, sigma1: Sigma1Spec) -> Result<Self> {
        CouplingSpec::new(self.d, self.n, self.gamma, self.c, sigma1, self.sigma2.clone())
    }

    pub fn table(&self) -> &RadialTable {
        &self.table
    }

    pub fn constants(&self) -> CouplingConstants {
        CouplingConstants::new(self.gamma, self.table.kappa(), &self.sigma1)
    }

    /// gamma^2 kappa (2 pi)^{2d} sigma_{1,m}^2.
    pub fn mode_coupling(&self, m: &Mode) -> f64 {
        let s = self.sigma1.coeff(m);
        let v = torus_volume(self.d);
        self.gamma * self.gamma * self.table.kappa() * v * v * s * s
    }

    /// Wave speed, or an error for the Hartree limit.
    pub fn finite_c(&self) -> Result<f64> {
        self.c
            .finite()
            .ok_or_else(|| Error::invalid("this operation needs a finite wave speed c"))
    }
}

/// kappa, 4 gamma^2 kappa ||sigma_1||_{L1}^2, the smallness margin and Upsilon*.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingConstants {
    pub gamma: f64,
    pub kappa: f64,
    pub kappa_l1_sigma1_product: f64,
    pub margin: f64,
    pub upsilon_star: f64,
    pub sigma1_mean: f64,
    pub sigma1_l1: f64,
}

impl CouplingConstants {
    pub fn new(gamma: f64, kappa: f64, sigma1: &Sigma1Spec) -> Self {
        let l1 = sigma1.l1_norm();
        let mean = sigma1.mean();
        let product = 4.0 * gamma * gamma * kappa * l1 * l1;
        CouplingConstants {
            gamma,
            kappa,
            kappa_l1_sigma1_product: product,
            margin: 1.0 - product,
            upsilon_star: gamma * gamma * kappa * mean * mean,
            sigma1_mean: mean,
            sigma1_l1: l1,
        }
    }
}

/// Outcome of the global smallness test 4 gamma^2 kappa ||sigma_1||_{L1}^2 < 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Smallness {
    pub holds: bool,
    pub margin: f64,
}

pub fn smallness_check(constants: &CouplingConstants) -> Smallness {
    Smallness {
        holds: constants.kappa_l1_sigma1_product < 1.0,
        margin: constants.margin,
    }
}

/// kappa = |S^{n-1}|/(2 pi)^n int |sigma_2_hat|^2 r^{n-3} dr.
pub fn compute_kappa(spec: &Sigma2Spec, n: usize) -> Result<f64> {
    Ok(RadialTable::new(spec, n)?.kappa())
}

/// kappa_s = |S^{n-1}|/(2 pi)^n int |sigma_2_hat|^2 r^{n-1}/(s + r^2) dr.
///
/// s = 0 reproduces kappa; real negative s lies on the cut and is rejected.
pub fn compute_kappa_mu(spec: &Sigma2Spec, n: usize, s: C64) -> Result<C64> {
    if s.im == 0.0 && s.re < 0.0 {
        return Err(Error::BranchCut(s));
    }
    Ok(RadialTable::new(spec, n)?.kappa_s_with_derivative(s).0)
}

/// Memory kernel p(tau).
pub fn kernel_p(spec: &Sigma2Spec, n: usize, tau: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::invalid(format!("tau must be >= 0, got {tau}")));
    }
    Ok(RadialTable::new(spec, n)?.p(tau))
}

/// p_c(tau) = p(c tau)/c.
pub fn kernel_p_c(spec: &Sigma2Spec, n: usize, c: f64, tau: f64) -> Result<f64> {
    Ok(kernel_p(spec, n, c * tau)? / c)
}

/// int_0^T p_c(tau) d tau = (1/c^2) int_0^{cT} p.
pub fn kernel_p_c_integral(table: &RadialTable, c: f64, t: f64) -> f64 {
    table.p_integral(c * t) / (c * c)
}

/// gamma = sqrt(mass_ratio alpha beta).
pub fn gamma_from_physical(alpha: f64, beta: f64, mass_ratio: f64) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0 && mass_ratio > 0.0) {
        return Err(Error::invalid(format!(
            "alpha, beta, mass_ratio must all be > 0 (got {alpha}, {beta}, {mass_ratio})"
        )));
    }
    Ok((mass_ratio * alpha * beta).sqrt())
}
