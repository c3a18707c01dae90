//! Linear propagators, memory kernel weights and short nonlinear runs.

use std::collections::VecDeque;
use std::f64::consts::PI;

use proptest::prelude::*;
use swstab::dynamics::growth::exit_time;
use swstab::dynamics::memory::VolterraWeights;
use swstab::dynamics::{
    c_limit_study, evolve_hartree, evolve_linear_hartree, evolve_linear_sw, evolve_linear_sw_mode0,
    evolve_sw_field, evolve_sw_memory, fit_growth, measure_growth_rate, perturbed_plane_wave,
    reference_perturbation, GridSpec, GrowthOptions, InitialFieldContribution, LinearHartreeState,
    LinearSwState, MemoryOptions, MonitorTrace, SolverOptions,
};
use swstab::dynamics::linear::propagate_hartree_mode;
use swstab::{CouplingSpec, Error, Mode, Speed, C64};

fn m1(v: i64) -> Mode {
    Mode::one_d(v)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// p for the Gaussian sigma_2 with unit width in n = 3.
fn p_closed(tau: f64) -> f64 {
    PI.powf(1.5) * tau * (-tau * tau / 4.0).exp()
}

/// RK4 on d/dt (q, p) = [[-i k.m, a], [b, -i k.m]] (q, p).
fn rk4_mode(k: i64, m: i64, g: f64, t: f64, q: C64, p: C64) -> (C64, C64) {
    let a = 0.5 * (m * m) as f64;
    let b = -a + 2.0 * g;
    let shift = C64::new(0.0, -(k * m) as f64);
    let f = |q: C64, p: C64| (shift * q + p * a, q * b + shift * p);
    let n = 20_000;
    let h = t / n as f64;
    let (mut q, mut p) = (q, p);
    for _ in 0..n {
        let k1 = f(q, p);
        let k2 = f(q + k1.0 * (h / 2.0), p + k1.1 * (h / 2.0));
        let k3 = f(q + k2.0 * (h / 2.0), p + k2.1 * (h / 2.0));
        let k4 = f(q + k3.0 * h, p + k3.1 * h);
        q += (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0) * (h / 6.0);
        p += (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1) * (h / 6.0);
    }
    (q, p)
}

#[test]
fn linear_hartree_matches_rk4() {
    let spec = CouplingSpec::reference(0.1, Speed::Infinite);
    let strong = CouplingSpec::reference(0.5, Speed::Infinite);
    for s in [&spec, &strong] {
        for (k, m) in [(0, 0), (0, 1), (1, 1), (2, 1), (1, -2), (3, 3)] {
            let (q0, p0) = (C64::new(0.3, -0.2), C64::new(-0.1, 0.7));
            let g = s.mode_coupling(&m1(m));
            let want = rk4_mode(k, m, g, 2.5, q0, p0);
            let got = propagate_hartree_mode(&m1(k), &m1(m), s, 2.5, q0, p0);
            let scale = 1.0 + want.0.norm() + want.1.norm();
            assert!((got.0 - want.0).norm() < 1e-10 * scale, "k {k} m {m}");
            assert!((got.1 - want.1).norm() < 1e-10 * scale, "k {k} m {m}");
        }
    }
}

#[test]
fn linear_hartree_kernel_direction() {
    let spec = CouplingSpec::reference(0.1, Speed::Infinite);
    let (q, p) = propagate_hartree_mode(&m1(0), &m1(0), &spec, 7.0, C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    assert_eq!((q, p), (C64::new(0.0, 0.0), C64::new(1.0, 0.0)));
    // Jordan block: P_0 grows linearly at rate 2 gamma^2 kappa <sigma_1>^2 Q_0.
    let (q, p) = propagate_hartree_mode(&m1(0), &m1(0), &spec, 7.0, C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let rate = 2.0 * 0.01 * spec.constants().kappa;
    assert_eq!(q, C64::new(1.0, 0.0));
    assert!((p.re - 7.0 * rate).abs() < 1e-12 && p.im == 0.0);
}

#[test]
fn linear_hartree_bounded_to_t100() {
    let spec = CouplingSpec::reference(0.1, Speed::Infinite);
    let w0 = LinearHartreeState::from_coefficients(m1(0), &reference_perturbation(1));
    assert!(w0.is_zero_mean());
    let bound = w0.h1_bound(&spec).unwrap();
    let e0 = w0.e0(&spec);
    for s in evolve_linear_hartree(&w0, 100.0, 2000, &spec).unwrap() {
        assert!(s.h1_norm(1) <= bound);
        assert!((s.e0(&spec) - e0).abs() < 1e-10 * e0.abs());
    }
}

#[test]
fn linear_hartree_bound_refused_outside_smallness() {
    let spec = CouplingSpec::reference(0.2, Speed::Infinite);
    let w0 = LinearHartreeState::from_coefficients(m1(0), &reference_perturbation(1));
    assert!(w0.h1_bound(&spec).is_none());
}

#[test]
fn linear_sw_bounded_and_conserving() {
    let spec = CouplingSpec::reference(0.1, Speed::Finite(1.0));
    let w0 = LinearSwState::from_coefficients(m1(0), &reference_perturbation(1), spec.table().len());
    assert!(w0.is_zero_mean());
    let bound = w0.h1_bound(&spec).unwrap().unwrap();
    let e0 = w0.energy(&spec).unwrap();
    let out = evolve_linear_sw(&w0, 20.0, 1e-2, 10, &spec).unwrap();
    assert_eq!(out.len(), 201);
    for s in &out {
        assert!(s.h1_norm(1) <= bound);
        assert!((s.energy(&spec).unwrap() - e0).abs() < 1e-6 * e0);
        assert!(s.is_zero_mean());
    }
}

#[test]
fn linear_sw_wave_energy_constant_when_decoupled() {
    let spec = CouplingSpec::reference(0.0, Speed::Finite(2.0));
    let n = spec.table().len();
    let mut w0 = LinearSwState::from_coefficients(m1(0), &reference_perturbation(1), n);
    for (j, v) in w0.psi.iter_mut().enumerate() {
        *v = C64::new(((j % 7) as f64 - 3.0) * 1e-3, (j % 3) as f64 * 1e-3);
    }
    let e0 = w0.energy(&spec).unwrap();
    for s in evolve_linear_sw(&w0, 3.0, 1e-2, 50, &spec).unwrap() {
        assert!((s.energy(&spec).unwrap() - e0).abs() < 1e-12 * e0);
    }
}

#[test]
fn mode0_response_matches_kernel_quadrature() {
    // With zero initial field, P_0'' = 2 gamma^2 <sigma_1>^2 Q_0 c p(c t), so
    // P_0(t) = 2 gamma^2 <sigma_1>^2 Q_0 int_0^t (t - s) c p(c s) ds.
    for c in [1.0, 3.0] {
        let spec = CouplingSpec::reference(0.1, Speed::Finite(c));
        let z = vec![C64::new(0.0, 0.0); spec.table().len()];
        let tr = evolve_linear_sw_mode0(C64::new(1.0, 0.0), C64::new(0.0, 0.0), &z, &z, 6.0, 12, &spec).unwrap();
        let mean = spec.sigma1.mean();
        for (t, p) in tr.t.iter().zip(&tr.p) {
            let want = 2.0 * 0.01 * mean * mean * simpson(|s| (t - s) * c * p_closed(c * s), 0.0, *t, 4000);
            assert!((p.re - want).abs() < 1e-8 * (1.0 + want.abs()), "c {c} t {t}: {} vs {want}", p.re);
            assert_eq!(p.im, 0.0);
        }
        assert!(tr.q.iter().all(|q| *q == C64::new(1.0, 0.0)));
    }
}

#[test]
fn mode0_slope_tends_to_hartree_rate() {
    let spec = CouplingSpec::reference(0.1, Speed::Finite(1.0));
    let z = vec![C64::new(0.0, 0.0); spec.table().len()];
    let tr = evolve_linear_sw_mode0(C64::new(1.0, 0.0), C64::new(0.0, 0.0), &z, &z, 50.0, 2000, &spec).unwrap();
    let want = 2.0 * 0.01 * spec.table().kappa();
    assert!((tr.slope(25.0, 50.0) - want).abs() < 1e-8 * want);
}

#[test]
fn volterra_weights_integrate_kernel() {
    // int_0^t c p(c s) ds = 2 pi^{3/2} (1 - exp(-(c t)^2 / 4)).
    for (c, dt, n) in [(1.0, 1e-2, 99usize), (100.0, 1e-3, 100), (100.0, 1e-3, 400)] {
        let spec = CouplingSpec::reference(0.1, Speed::Finite(c));
        let mut w = VolterraWeights::new(spec.table(), c, dt);
        let hist: VecDeque<C64> = vec![C64::new(1.0, 0.0); n + 1].into();
        let got = w.convolve(&hist, C64::new(1.0, 0.0), n);
        let t = (n as f64 + 0.5) * dt;
        let want = 2.0 * PI.powf(1.5) * (1.0 - (-(c * t) * (c * t) / 4.0).exp());
        assert!((got.re - want).abs() < 1e-6 * want, "c {c} t {t}: {} vs {want}", got.re);
        if c * t >= 10.0 {
            assert!((got.re - spec.table().kappa()).abs() < 1e-3);
        }
        let zero: VecDeque<C64> = vec![C64::new(0.0, 0.0); n + 1].into();
        assert_eq!(w.convolve(&zero, C64::new(0.0, 0.0), n), C64::new(0.0, 0.0));
    }
}

#[test]
fn volterra_weights_linear_history() {
    // rho(s) = s: int_0^t K(s) (t - s) ds, exact for piecewise-linear product integration.
    let c = 2.0;
    let dt = 1e-2;
    let n = 150;
    let spec = CouplingSpec::reference(0.1, Speed::Finite(c));
    let mut w = VolterraWeights::new(spec.table(), c, dt);
    let t = (n as f64 + 0.5) * dt;
    let hist: VecDeque<C64> = (0..=n).map(|i| C64::new(t - i as f64 * dt, 0.0)).collect();
    let got = w.convolve(&hist, C64::new(0.0, 0.0), n);
    let want = simpson(|s| c * p_closed(c * s) * (t - s), 0.0, t, 6000);
    assert!((got.re - want).abs() < 1e-7 * want, "{} vs {want}", got.re);
}

fn short_grid(t_final: f64) -> GridSpec {
    GridSpec::new(64, 1, 5e-3, t_final)
}

#[test]
fn field_solver_preserves_plane_wave() {
    let spec = CouplingSpec::reference(0.1, Speed::Finite(1.0));
    let g = short_grid(1.0);
    let st = perturbed_plane_wave(&spec, &g, m1(1), 0.0, &[]).unwrap();
    let run = evolve_sw_field(&st, &spec, &g, &SolverOptions::new(m1(1), 20)).unwrap();
    assert!(run.trace.is_consistent());
    assert!(run.trace.h1_fluct.iter().all(|v| *v < 1e-11));
    assert!(MonitorTrace::relative_drift(&run.trace.l2_mass) < 1e-12);
}

#[test]
fn remainder_bound_holds_on_samples() {
    let spec = CouplingSpec::reference(0.1, Speed::Finite(1.0));
    let g = short_grid(2.0);
    let st = perturbed_plane_wave(&spec, &g, m1(1), 0.05, &reference_perturbation(1)).unwrap();
    let run = evolve_sw_field(&st, &spec, &g, &SolverOptions::new(m1(1), 20)).unwrap();
    for (r, b) in run.trace.remainder.iter().zip(&run.trace.remainder_bound) {
        assert!(r.is_finite() && r <= b, "{r} > {b}");
    }
}

#[test]
fn memory_solver_tracks_field_solver() {
    let spec = CouplingSpec::reference(0.1, Speed::Finite(1.0));
    let g = short_grid(1.0);
    let st = perturbed_plane_wave(&spec, &g, m1(1), 0.05, &reference_perturbation(1)).unwrap();
    let opts = SolverOptions::new(m1(1), 0).light();
    let field = evolve_sw_field(&st, &spec, &g, &opts).unwrap();
    let init = InitialFieldContribution::from_state(&st, &spec).unwrap();
    let mem = evolve_sw_memory(&st, &init, &spec, &g, &opts, &MemoryOptions::default()).unwrap();
    let gap = swstab::dynamics::l2_distance(field.final_u(), mem.final_u(), 1);
    assert!(gap < 1e-6, "gap {gap}");
}

#[test]
fn decoupled_limit_gap_is_zero() {
    let spec = CouplingSpec::reference(0.0, Speed::Finite(1.0));
    let g = short_grid(1.0);
    let study = c_limit_study(&spec, &g, m1(0), 0.05, &reference_perturbation(1), &[1.0, 4.0], 20).unwrap();
    for row in &study.rows {
        assert!(row.sup_gap < 1e-12, "c {}: {}", row.c, row.sup_gap);
    }
}

#[test]
fn c_limit_rejects_bad_speeds() {
    let spec = CouplingSpec::reference(0.1, Speed::Finite(1.0));
    let w = reference_perturbation(1);
    assert!(c_limit_study(&spec, &short_grid(0.1), m1(0), 0.05, &w, &[], 1).is_err());
    assert!(c_limit_study(&spec, &short_grid(0.1), m1(0), 0.05, &w, &[-1.0], 1).is_err());
}

#[test]
fn hartree_solver_rejects_bad_grid() {
    let spec = CouplingSpec::reference(0.1, Speed::Infinite);
    let u = vec![C64::new(1.0, 0.0); 48];
    let g = GridSpec::new(48, 1, 1e-3, 0.1);
    assert!(evolve_hartree(&u, &spec, &g, &SolverOptions::new(m1(0), 1)).is_err());
}

#[test]
fn growth_refused_without_unstable_spectrum() {
    let spec = CouplingSpec::reference(0.1, Speed::Finite(1.0));
    let r = measure_growth_rate(&m1(0), 1e-5, &spec, &short_grid(0.0), &GrowthOptions::default());
    assert!(matches!(r, Err(Error::NoUnstableSpectrum)));
}

#[test]
fn growth_fit_on_synthetic_exponential() {
    let opts = GrowthOptions::default();
    let t: Vec<f64> = (0..400).map(|i| i as f64 * 0.5).collect();
    let obs: Vec<f64> = t.iter().map(|t| 1e-5 * (0.05 * t).exp()).collect();
    let fit = fit_growth(&t, &obs, 1e-5, &opts).unwrap();
    assert!((fit.slope - 0.05).abs() < 1e-12);
    let exit = exit_time(&t, &obs, 1e-2).unwrap();
    assert!((exit - 1e3f64.ln() / 0.05).abs() < 1e-9);
    let flat = vec![1e-5; 400];
    assert!(matches!(fit_growth(&t, &flat, 1e-5, &opts), Err(Error::NoGrowthWindow(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linear_hartree_conserves_e0(
        gamma in 0.0f64..0.149, k in -3i64..=3, m in -4i64..=4, t in 0.0f64..30.0,
        qr in -1.0f64..1.0, qi in -1.0f64..1.0, pr in -1.0f64..1.0, pi in -1.0f64..1.0,
    ) {
        let spec = CouplingSpec::reference(gamma, Speed::Infinite);
        prop_assume!(m != 0);
        let w0 = LinearHartreeState::single(m1(k), m1(m), C64::new(qr, qi), C64::new(pr, pi));
        let out = evolve_linear_hartree(&w0, t, 1, &spec).unwrap();
        let (e0, e1) = (w0.e0(&spec), out[1].e0(&spec));
        prop_assert!((e0 - e1).abs() <= 1e-12 * (1.0 + e0.abs()));
        if let Some(b) = w0.h1_bound(&spec) {
            prop_assert!(out[1].h1_norm(1) <= b * (1.0 + 1e-12));
        }
    }
}
