//! Spectral analysis of the linearized Schrodinger-wave system: the per-mode
//! cubic, the negative-eigenvalue counts, and the dispersion function R_m.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{smallness_check, CouplingSpec, Speed};
use crate::error::{Error, Result};
use crate::modes::{display_order, Mode};
use crate::report::StabilityReport;
use crate::torus_volume;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicReport {
    pub m: Mode,
    pub k: Mode,
    pub b: f64,
    pub c_coef: f64,
    pub d_coef: f64,
    pub discriminant: f64,
    /// mu_1 <= mu_2 <= mu_3.
    pub roots: [f64; 3],
    /// lambda_j = mu_j + m^2/2.
    pub shifted: [f64; 3],
    /// Critical points (-b -/+ sqrt(b^2 - 3c))/3.
    pub mu_max: f64,
    pub mu_min: f64,
    /// P(-m^2/2) by Horner.
    pub p_half: f64,
    /// -(1/8)(m^4 - 4(k.m)^2 - 4 m^2 g sigma^2), the same value in closed form.
    pub p_half_closed: f64,
    pub sign_p_half: i8,
    pub negative_count_contrib: u32,
    /// mu_1 < mu_max < mu_2 <= 0 < mu_min < mu_3.
    pub ordering_ok: bool,
}

impl CubicReport {
    pub fn eval(&self, mu: f64) -> f64 {
        ((mu + self.b) * mu + self.c_coef) * mu + self.d_coef
    }
}

/// P(mu) = mu^3 + b mu^2 + c mu + d with b = (m^2-1)/2, c = -((k.m)^2 + g sigma^2),
/// d = -(k.m)^2 b, where g sigma^2 = gamma^2 kappa (2 pi)^{2d} sigma_{1,m}^2.
pub fn cubic_report(m: &Mode, k: &Mode, spec: &CouplingSpec) -> Result<CubicReport> {
    if m.is_zero() {
        return Err(Error::invalid("cubic_report needs m != 0"));
    }
    if spec.sigma1.coeff(m) == 0.0 {
        return Err(Error::invalid(format!(
            "sigma_1 vanishes at m = {m}; use the free-mode analysis"
        )));
    }
    let m2 = m.norm2() as f64;
    let km = k.dot(m) as f64;
    let gs = spec.mode_coupling(m);
    let b = 0.5 * (m2 - 1.0);
    let c = -(km * km + gs);
    let d = -km * km * b;
    let disc = 18.0 * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * c * c * c - 27.0 * d * d;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    if p >= 0.0 {
        return Err(Error::invalid(format!(
            "cubic at m = {m} is degenerate (no three distinct real roots)"
        )));
    }
    let amp = 2.0 * (-p / 3.0).sqrt();
    let arg = ((3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut roots = [0.0; 3];
    for (j, r) in roots.iter_mut().enumerate() {
        *r = amp * (theta - 2.0 * std::f64::consts::PI * j as f64 / 3.0).cos() - b / 3.0;
    }
    let poly = |x: f64| ((x + b) * x + c) * x + d;
    let dpoly = |x: f64| (3.0 * x + 2.0 * b) * x + c;
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let dp = dpoly(*r);
            if dp != 0.0 {
                let step = poly(*r) / dp;
                if step.is_finite() {
                    *r -= step;
                }
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sq = (b * b - 3.0 * c).sqrt();
    let mu_max = (-b - sq) / 3.0;
    let mu_min = (-b + sq) / 3.0;
    let half = -0.5 * m2;
    let p_half = poly(half);
    let p_half_closed = -(m2 * m2 - 4.0 * km * km - 4.0 * m2 * gs) / 8.0;
    let ordering_ok =
        roots[0] < mu_max && mu_max < roots[1] && roots[1] <= 0.0 && 0.0 < mu_min && mu_min < roots[2];
    Ok(CubicReport {
        m: *m,
        k: *k,
        b,
        c_coef: c,
        d_coef: d,
        discriminant: disc,
        roots,
        shifted: roots.map(|r| r + 0.5 * m2),
        mu_max,
        mu_min,
        p_half,
        p_half_closed,
        sign_p_half: if p_half > 0.0 {
            1
        } else if p_half < 0.0 {
            -1
        } else {
            0
        },
        negative_count_contrib: u32::from(p_half > 0.0),
        ordering_ok,
    })
}

/// Eigenvalues (m^2 + 2 k.m)/2 and (m^2 - 2 k.m)/2 of the free block.
pub fn free_mode_eigenvalues(m: &Mode, k: &Mode) -> [f64; 2] {
    let m2 = m.norm2() as f64;
    let km = k.dot(m) as f64;
    [0.5 * (m2 + 2.0 * km), 0.5 * (m2 - 2.0 * km)]
}

/// The two mode-0 eigenvalues (lambda_-, lambda_+) of S L.
pub fn sw_mode0_lambda(spec: &CouplingSpec) -> (f64, f64) {
    let g = 4.0 * spec.mode_coupling(&Mode::zero(spec.d));
    let s = (0.25 + g).sqrt();
    ((0.5 - s) / 2.0, (0.5 + s) / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianModeSpectrum {
    pub m: Mode,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// (1 - delta)/5 when the per-mode smallness delta < 1 applies (m != 0).
    pub lower_bound: Option<f64>,
}

/// Spectrum of the k = 0 coercivity operator on mode m.
pub fn sw_hessian_mode_spectrum(m: &Mode, spec: &CouplingSpec) -> HessianModeSpectrum {
    let m2 = m.norm2() as f64;
    let g = 4.0 * spec.mode_coupling(m);
    let s = ((0.5 * (m2 - 1.0)).powi(2) + g).sqrt();
    let lower_bound = if m.is_zero() {
        None
    } else {
        let delta = (1..=2 * spec.sigma1.band_limit().max(1))
            .flat_map(|b| Mode::box_iter(spec.d, b))
            .filter(|mm| !mm.is_zero())
            .map(|mm| 4.0 * spec.mode_coupling(&mm) / mm.norm2() as f64)
            .fold(0.0, f64::max);
        (delta < 1.0).then_some((1.0 - delta) / 5.0)
    };
    HessianModeSpectrum {
        m: *m,
        lambda_plus: (0.5 * (m2 + 1.0) + s) / 2.0,
        lambda_minus: (0.5 * (m2 + 1.0) - s) / 2.0,
        lower_bound,
    }
}

/// Per-mode classification behind the counting identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeVerdict {
    pub m: Mode,
    pub sigma_zero: bool,
    /// Sign of m^4 - 4 (k.m)^2.
    pub dispersion_sign: i8,
    pub negative_contrib: u32,
    pub kernel_contrib: u32,
    /// "N+", "N_C+" or "none".
    pub counter: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwCountReport {
    pub k: Mode,
    #[serde(rename = "n_L")]
    pub n_l: u32,
    pub dim_ker: u32,
    #[serde(rename = "K_star")]
    pub k_star: Vec<Mode>,
    #[serde(rename = "N0")]
    pub n0: u32,
    #[serde(rename = "Nminus")]
    pub n_minus: u32,
    #[serde(rename = "Nplus")]
    pub n_plus: u32,
    #[serde(rename = "N_Cplus")]
    pub n_c_plus: u32,
    /// Modes counted by N_C+.
    pub unstable_modes: Vec<Mode>,
    pub per_mode: Vec<ModeVerdict>,
    /// (U_0, Y_0) = -1 / (2 gamma^2 (2 pi)^d sigma_{1,0}^2 kappa), negative when N0 = 1.
    pub u0_y0: Option<f64>,
    pub smallness_margin: f64,
    pub in_proven_regime: bool,
}

/// Enumeration radius: m^4 <= 4 (k.m)^2 forces |m|^2 <= 4 |k|^2.
fn enumeration_bound(k: &Mode, m_max: i64) -> i64 {
    let kk = (2.0 * k.norm()).ceil() as i64;
    kk.max(m_max).max(0)
}

/// All counts, flagged with whether the smallness hypothesis holds.
pub fn counting_report(k: &Mode, m_max: i64, spec: &CouplingSpec) -> SwCountReport {
    let small = smallness_check(&spec.constants());
    let bound = enumeration_bound(k, m_max);
    let mut per_mode = Vec::new();
    let mut k_star = Vec::new();
    let mut unstable = Vec::new();
    let (mut n_plus, mut n_c_plus) = (0u32, 0u32);
    for m in Mode::box_iter(spec.d, bound) {
        if m.is_zero() {
            continue;
        }
        let m2 = m.norm2();
        let km = k.dot(&m);
        let disp = m2 * m2 - 4 * km * km;
        let sigma_zero = spec.sigma1.coeff(&m) == 0.0;
        let (neg, ker, counter) = match (sigma_zero, disp.signum()) {
            (true, -1) => (1, 0, "N+"),
            (true, 0) => (0, 1, "none"),
            (false, -1) | (false, 0) => (1, 0, "N_C+"),
            _ => (0, 0, "none"),
        };
        if sigma_zero && disp == 0 {
            k_star.push(m);
        }
        match counter {
            "N+" => n_plus += 1,
            "N_C+" => {
                n_c_plus += 1;
                unstable.push(m);
            }
            _ => {}
        }
        per_mode.push(ModeVerdict {
            m,
            sigma_zero,
            dispersion_sign: disp.signum() as i8,
            negative_contrib: neg,
            kernel_contrib: ker,
            counter: counter.into(),
        });
    }
    unstable.sort_by(display_order);
    k_star.sort_by(display_order);
    let n_l = 1 + per_mode.iter().map(|v| v.negative_contrib).sum::<u32>();
    let s0 = spec.sigma1.coeff(&Mode::zero(spec.d));
    let denom = 2.0 * spec.gamma * spec.gamma * torus_volume(spec.d) * s0 * s0 * spec.table().kappa();
    SwCountReport {
        k: *k,
        n_l,
        dim_ker: 1 + k_star.len() as u32,
        k_star,
        n0: 1,
        n_minus: 0,
        n_plus,
        n_c_plus,
        unstable_modes: unstable,
        per_mode,
        u0_y0: (denom > 0.0).then(|| -1.0 / denom),
        smallness_margin: small.margin,
        in_proven_regime: small.holds,
    }
}

fn require_regime(report: SwCountReport) -> Result<SwCountReport> {
    if report.in_proven_regime {
        Ok(report)
    } else {
        Err(Error::OutOfRegime(format!(
            "smallness fails (margin {:.6}); counting formulas are unproven here",
            report.smallness_margin
        )))
    }
}

/// n(S L), dim Ker and K*; refuses when smallness fails.
pub fn negative_count(k: &Mode, m_max: i64, spec: &CouplingSpec) -> Result<SwCountReport> {
    require_regime(counting_report(k, m_max, spec))
}

/// N0, N-, N+, N_C+; refuses when smallness fails.
pub fn counting_breakdown(k: &Mode, m_max: i64, spec: &CouplingSpec) -> Result<SwCountReport> {
    require_regime(counting_report(k, m_max, spec))
}

/// R_m(lambda) = (lambda + i k.m)^2 + m^4/4 - m^2 gamma^2 (2 pi)^{2d} sigma_{1,m}^2 kappa_{lambda^2/c^2}.
#[derive(Clone, Debug)]
pub struct DispersionFunction<'a> {
    spec: &'a CouplingSpec,
    pub m: Mode,
    km: f64,
    m4_quarter: f64,
    coupling: f64,
    c: Option<f64>,
    kappa: f64,
}

impl<'a> DispersionFunction<'a> {
    pub fn new(spec: &'a CouplingSpec, k: &Mode, m: &Mode) -> Self {
        let v = torus_volume(spec.d);
        let s = spec.sigma1.coeff(m);
        let m2 = m.norm2() as f64;
        DispersionFunction {
            spec,
            m: *m,
            km: k.dot(m) as f64,
            m4_quarter: 0.25 * m2 * m2,
            coupling: m2 * spec.gamma * spec.gamma * v * v * s * s,
            c: spec.c.finite(),
            kappa: spec.table().kappa(),
        }
    }

    /// R_m(lambda) and its derivative.
    pub fn eval(&self, lambda: C64) -> (C64, C64) {
        let shift = lambda + C64::new(0.0, self.km);
        let (kap, dkap_dl) = match self.c {
            Some(c) => {
                let s = lambda * lambda / (c * c);
                let (k, dk) = self.spec.table().kappa_s_with_derivative(s);
                (k, dk * lambda * (2.0 / (c * c)))
            }
            None => (C64::new(self.kappa, 0.0), C64::new(0.0, 0.0)),
        };
        (
            shift * shift + self.m4_quarter - kap * self.coupling,
            shift * 2.0 - dkap_dl * self.coupling,
        )
    }

    pub fn value(&self, lambda: C64) -> C64 {
        self.eval(lambda).0
    }
}

/// Search rectangle in the open right half plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    /// Default search box for mode m: it contains every root of R_m with Re lambda >= 1e-4.
    pub fn default_for(spec: &CouplingSpec, k: &Mode, m: &Mode) -> Rect {
        let f = DispersionFunction::new(spec, k, m);
        let reach = (f.coupling * f.kappa).sqrt() + 1.0;
        let half = 0.5 * m.norm2() as f64 + reach;
        Rect {
            re_min: 1e-4,
            re_max: reach,
            im_min: -f.km - half,
            im_max: -f.km + half,
        }
    }

    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re_min, self.im_min),
            C64::new(self.re_max, self.im_min),
            C64::new(self.re_max, self.im_max),
            C64::new(self.re_min, self.im_max),
        ]
    }

    fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn split(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let xm = self.re_min + fx * (self.re_max - self.re_min);
        let ym = self.im_min + fy * (self.im_max - self.im_min);
        [
            Rect { re_min: self.re_min, re_max: xm, im_min: self.im_min, im_max: ym },
            Rect { re_min: xm, re_max: self.re_max, im_min: self.im_min, im_max: ym },
            Rect { re_min: xm, re_max: self.re_max, im_min: ym, im_max: self.im_max },
            Rect { re_min: self.re_min, re_max: xm, im_min: ym, im_max: self.im_max },
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootTolerances {
    pub residual: f64,
    pub winding: f64,
    pub newton_max_iter: usize,
    pub max_depth: usize,
}

impl Default for RootTolerances {
    fn default() -> Self {
        RootTolerances {
            residual: 1e-10,
            winding: 0.05,
            newton_max_iter: 60,
            max_depth: 14,
        }
    }
}

/// A partner eigenvalue implied by the symmetries of the linearization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootPartner {
    pub m: Mode,
    pub lambda: C64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnstableRoot {
    pub m: Mode,
    pub lambda: C64,
    pub residual: f64,
    pub newton_iters: usize,
    /// (-m, conj lambda), (m, -conj lambda), (-m, -lambda).
    pub partners: Vec<RootPartner>,
}

/// Winding number of R around the rectangle boundary, by phase tracking.
pub fn winding_number(f: &DispersionFunction, rect: &Rect) -> Result<f64> {
    let corners = rect.corners();
    let mut total = 0.0;
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let pieces = 64;
        let mut za = a;
        let mut fa = f.value(za);
        for i in 1..=pieces {
            let zb = a + (b - a) * (i as f64 / pieces as f64);
            let fb = f.value(zb);
            total += phase_change(f, za, fa, zb, fb, 0)?;
            za = zb;
            fa = fb;
        }
    }
    Ok(total / (2.0 * std::f64::consts::PI))
}

fn phase_change(f: &DispersionFunction, za: C64, fa: C64, zb: C64, fb: C64, depth: usize) -> Result<f64> {
    const MAX_STEP: f64 = std::f64::consts::FRAC_PI_4;
    if fa.norm() == 0.0 || fb.norm() == 0.0 {
        return Err(Error::RectangleRejected { winding: f64::NAN });
    }
    let zm = (za + zb) * 0.5;
    let fm = f.value(zm);
    if fm.norm() == 0.0 {
        return Err(Error::RectangleRejected { winding: f64::NAN });
    }
    let d1 = (fm / fa).arg();
    let d2 = (fb / fm).arg();
    if d1.abs() <= MAX_STEP && d2.abs() <= MAX_STEP {
        return Ok(d1 + d2);
    }
    if depth > 48 {
        return Err(Error::RectangleRejected { winding: f64::NAN });
    }
    Ok(phase_change(f, za, fa, zm, fm, depth + 1)? + phase_change(f, zm, fm, zb, fb, depth + 1)?)
}

fn newton(f: &DispersionFunction, z0: C64, tol: &RootTolerances) -> (C64, f64, usize, bool) {
    let mut z = z0;
    let (mut r, mut dr) = f.eval(z);
    for it in 1..=tol.newton_max_iter {
        if dr.norm() == 0.0 {
            return (z, r.norm(), it, false);
        }
        let step = r / dr;
        z -= step;
        let e = f.eval(z);
        r = e.0;
        dr = e.1;
        if !z.re.is_finite() || !z.im.is_finite() {
            return (z, f64::INFINITY, it, false);
        }
        if r.norm() < tol.residual && step.norm() < 1e-12 * (1.0 + z.norm()) {
            return (z, r.norm(), it, true);
        }
    }
    let ok = r.norm() < tol.residual;
    (z, r.norm(), tol.newton_max_iter, ok)
}

fn search_cell(
    f: &DispersionFunction,
    rect: &Rect,
    tol: &RootTolerances,
    depth: usize,
    out: &mut Vec<(C64, f64, usize)>,
) -> Result<()> {
    let w = winding_number(f, rect)?;
    let n = w.round();
    if (w - n).abs() > tol.winding {
        return Err(Error::RectangleRejected { winding: w });
    }
    if n < 0.5 {
        return Ok(());
    }
    if n < 1.5 {
        let center = C64::new(0.5 * (rect.re_min + rect.re_max), 0.5 * (rect.im_min + rect.im_max));
        let (z, res, iters, ok) = newton(f, center, tol);
        if ok && rect.contains(z) {
            out.push((z, res, iters));
            return Ok(());
        }
        if depth >= tol.max_depth {
            return Err(Error::NewtonDiverged { iters, residual: res });
        }
    } else if depth >= tol.max_depth {
        return Err(Error::RectangleRejected { winding: w });
    }
    // Off-center split fractions sidestep zeros that sit on a cut line.
    let mut last = None;
    for frac in [0.5, 0.4713, 0.5371, 0.4129] {
        let mut local = Vec::new();
        let res: Result<()> = rect
            .split(frac, 1.0 - frac)
            .iter()
            .try_for_each(|cell| search_cell(f, cell, tol, depth + 1, &mut local));
        match res {
            Ok(()) => {
                out.extend(local);
                return Ok(());
            }
            Err(e @ Error::RectangleRejected { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

fn partners(spec: &CouplingSpec, k: &Mode, m: &Mode, lambda: C64) -> Vec<RootPartner> {
    let neg = m.neg();
    [(neg, lambda.conj()), (*m, -lambda.conj()), (neg, -lambda)]
        .into_iter()
        .map(|(pm, pl)| RootPartner {
            m: pm,
            lambda: pl,
            residual: DispersionFunction::new(spec, k, &pm).value(pl).norm(),
        })
        .collect()
}

/// Zeros of R_m in a rectangle of the right half plane, each refined by Newton.
pub fn dispersion_root_find(
    m: &Mode,
    k: &Mode,
    spec: &CouplingSpec,
    rect: &Rect,
    tol: &RootTolerances,
) -> Result<Vec<UnstableRoot>> {
    if !(rect.re_min > 0.0 && rect.re_max > rect.re_min && rect.im_max > rect.im_min) {
        return Err(Error::invalid(
            "search rectangle must be nondegenerate and lie in Re lambda > 0",
        ));
    }
    if spec.sigma1.coeff(m) == 0.0 || spec.gamma == 0.0 {
        // Free case: roots -i k.m +/- i m^2/2 lie on the imaginary axis.
        return Ok(vec![]);
    }
    let f = DispersionFunction::new(spec, k, m);
    let mut found = Vec::new();
    search_cell(&f, rect, tol, 0, &mut found)?;
    let mut roots: Vec<UnstableRoot> = Vec::new();
    for (z, res, iters) in found {
        if roots
            .iter()
            .any(|r| (r.lambda - z).norm() < 1e-8 * (1.0 + z.norm()))
        {
            continue;
        }
        roots.push(UnstableRoot {
            m: *m,
            lambda: z,
            residual: res,
            newton_iters: iters,
            partners: partners(spec, k, m, z),
        });
    }
    roots.sort_by(|a, b| b.lambda.re.partial_cmp(&a.lambda.re).unwrap());
    Ok(roots)
}

/// Canonical half of the lattice: first nonzero component positive.
fn is_canonical(m: &Mode) -> bool {
    m.c[0] > 0 || (m.c[0] == 0 && m.c[1] > 0)
}

/// Roots in every coupled mode; the -m partners are implied, not searched.
pub fn locate_unstable_roots(
    k: &Mode,
    m_max: i64,
    spec: &CouplingSpec,
    rect: Option<Rect>,
    tol: &RootTolerances,
) -> Result<Vec<UnstableRoot>> {
    let bound = enumeration_bound(k, m_max);
    let modes: Vec<Mode> = Mode::box_iter(spec.d, bound)
        .into_iter()
        .filter(|m| is_canonical(m) && spec.sigma1.coeff(m) != 0.0)
        .collect();
    let per_mode: Vec<Result<Vec<UnstableRoot>>> = modes
        .par_iter()
        .map(|m| {
            let r = rect.unwrap_or_else(|| Rect::default_for(spec, k, m));
            dispersion_root_find(m, k, spec, &r, tol)
        })
        .collect();
    let mut all = Vec::new();
    for r in per_mode {
        all.extend(r?);
    }
    all.sort_by(|a, b| b.lambda.re.partial_cmp(&a.lambda.re).unwrap());
    Ok(all)
}

/// Modes carrying a root with Re lambda > 0, partners included.
pub fn unstable_mode_set(roots: &[UnstableRoot]) -> Vec<Mode> {
    let mut v: Vec<Mode> = Vec::new();
    for r in roots {
        for m in std::iter::once(r.m).chain(r.partners.iter().filter(|p| p.lambda.re > 0.0).map(|p| p.m)) {
            if !v.contains(&m) {
                v.push(m);
            }
        }
    }
    v.sort_by(display_order);
    v
}

/// a* = max Re over the located roots.
pub fn growth_rate_predicted(
    k: &Mode,
    spec: &CouplingSpec,
    m_max: i64,
    tol: &RootTolerances,
) -> Result<(f64, Vec<UnstableRoot>)> {
    let roots = locate_unstable_roots(k, m_max, spec, None, tol)?;
    let a = roots
        .iter()
        .map(|r| r.lambda.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if roots.is_empty() {
        return Err(Error::NoUnstableSpectrum);
    }
    Ok((a, roots))
}

/// Counting plus (for finite c) located roots.
pub fn spectrum_report_sw(
    k: &Mode,
    m_max: i64,
    spec: &CouplingSpec,
    with_roots: bool,
    rect: Option<Rect>,
    tol: &RootTolerances,
) -> Result<StabilityReport> {
    let counts = counting_report(k, m_max, spec);
    let roots = if with_roots && matches!(spec.c, Speed::Finite(_)) {
        locate_unstable_roots(k, m_max, spec, rect, tol)?
    } else {
        vec![]
    };
    let a_star = roots.iter().map(|r| r.lambda.re).reduce(f64::max);
    let stable = counts.n_c_plus == 0;
    let verdict = if !counts.in_proven_regime {
        "out of proven regime"
    } else if stable {
        "spectrally stable"
    } else {
        "spectrally unstable"
    };
    Ok(StabilityReport {
        system: "schrodinger-wave".into(),
        k: *k,
        spectrally_stable: stable && counts.in_proven_regime,
        verdict: verdict.into(),
        in_proven_regime: counts.in_proven_regime,
        unstable_modes: counts.unstable_modes.clone(),
        hartree_modes: vec![],
        counts: Some(counts),
        roots,
        a_star,
    })
}
