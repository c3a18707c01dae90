//! Cubic, counting identity and dispersion roots of the coupled system.

use std::f64::consts::PI;

use proptest::prelude::*;
use swstab::hartree_spec::mode_eigenvalues;
use swstab::sw_spec::{
    counting_breakdown, counting_report, cubic_report, dispersion_root_find, growth_rate_predicted,
    locate_unstable_roots, negative_count, sw_hessian_mode_spectrum, sw_mode0_lambda,
    unstable_mode_set, winding_number, DispersionFunction, Rect, RootTolerances,
};
use swstab::{CouplingSpec, Error, Mode, Sigma1Spec, Speed, C64};

fn reference(c: Speed) -> CouplingSpec {
    CouplingSpec::reference(0.1, c)
}

fn m1(v: i64) -> Mode {
    Mode::one_d(v)
}

/// sigma_1 = mean/(2 pi) + sum_j a_j cos(j x) / (2 pi), nonnegative when sum a_j <= mean.
fn profile(mean: f64, cosines: &[(i64, f64)]) -> Sigma1Spec {
    let mut e = vec![(m1(0), mean / (2.0 * PI))];
    for &(j, a) in cosines {
        e.push((m1(j), a / (4.0 * PI)));
    }
    Sigma1Spec::new(1, &e).unwrap()
}

/// All three roots of a real monic cubic by Durand-Kerner iteration.
fn cubic_roots_oracle(b: f64, c: f64, d: f64) -> [f64; 3] {
    let p = |z: C64| ((z + b) * z + c) * z + d;
    let mut z = [C64::new(0.4, 0.9), C64::new(0.4, 0.9).powu(2), C64::new(0.4, 0.9).powu(3)];
    for _ in 0..500 {
        for i in 0..3 {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            z[i] -= p(z[i]) / den;
        }
    }
    let mut r = z.map(|v| v.re);
    r.sort_by(|a, b| a.partial_cmp(b).unwrap());
    r
}

#[test]
fn reference_cubic_k1_m1() {
    let spec = reference(Speed::Finite(1.0));
    let r = cubic_report(&m1(1), &m1(1), &spec).unwrap();
    assert_eq!(r.b, 0.0);
    assert!((r.c_coef + 1.0278417).abs() < 1e-7);
    assert_eq!(r.d_coef, 0.0);
    let want = [-1.0138253, 0.0, 1.0138253];
    for (a, b) in r.roots.iter().zip(want) {
        assert!((a - b).abs() < 1e-7);
    }
    for (a, b) in r.shifted.iter().zip([-0.5138253, 0.5, 1.5138253]) {
        assert!((a - b).abs() < 1e-7);
    }
    assert_eq!(r.negative_count_contrib, 1);
    assert!(r.discriminant > 0.0);
    assert!(r.ordering_ok);
}

#[test]
fn reference_cubic_k0_m1() {
    let spec = reference(Speed::Finite(1.0));
    let r = cubic_report(&m1(1), &m1(0), &spec).unwrap();
    assert!((r.c_coef + 0.0278417).abs() < 1e-7);
    assert_eq!(r.d_coef, 0.0);
    assert!((r.roots[0] + 0.16686).abs() < 1e-4 && (r.roots[2] - 0.16686).abs() < 1e-4);
    assert!(r.shifted.iter().all(|l| *l > 0.0));
    assert_eq!(r.negative_count_contrib, 0);
}

#[test]
fn cubic_rejects_free_modes() {
    let spec = reference(Speed::Finite(1.0));
    assert!(cubic_report(&m1(0), &m1(1), &spec).is_err());
    assert!(cubic_report(&m1(2), &m1(1), &spec).is_err());
}

#[test]
fn counts_reference() {
    let spec = reference(Speed::Finite(1.0));
    let r0 = negative_count(&m1(0), 3, &spec).unwrap();
    assert_eq!((r0.n_l, r0.dim_ker, r0.n_c_plus), (1, 1, 0));
    let r1 = counting_breakdown(&m1(1), 3, &spec).unwrap();
    assert_eq!(r1.n_l, 3);
    assert_eq!(r1.k_star, vec![m1(2), m1(-2)]);
    assert_eq!(r1.dim_ker, 3);
    assert_eq!(r1.n_c_plus, 2);
    assert_eq!(r1.unstable_modes, vec![m1(1), m1(-1)]);
    assert_eq!((r1.n0, r1.n_minus), (1, 0));
    assert!(r1.u0_y0.unwrap() < 0.0);
}

#[test]
fn counts_mean_only_profile() {
    let spec = reference(Speed::Finite(1.0)).with_sigma1(profile(1.0, &[])).unwrap();
    let r = counting_breakdown(&m1(1), 3, &spec).unwrap();
    assert_eq!(r.n_l, 3);
    assert_eq!(r.n_plus, 2);
    assert_eq!(r.n_c_plus, 0);
}

#[test]
fn counts_first_mode_three() {
    let spec = reference(Speed::Finite(1.0)).with_sigma1(profile(1.0, &[(3, 0.5)])).unwrap();
    let r = counting_breakdown(&m1(2), 3, &spec).unwrap();
    assert_eq!(r.unstable_modes, vec![m1(3), m1(-3)]);
    assert_eq!(r.n0 + r.n_minus + r.n_plus + r.n_c_plus, r.n_l);
}

#[test]
fn counts_refuse_outside_smallness() {
    let spec = CouplingSpec::reference(0.2, Speed::Finite(1.0));
    assert!(matches!(negative_count(&m1(1), 3, &spec), Err(Error::OutOfRegime(_))));
    assert!(!counting_report(&m1(1), 3, &spec).in_proven_regime);
}

#[test]
fn mode0_eigenvalues() {
    let spec = reference(Speed::Finite(1.0));
    let (lm, lp) = sw_mode0_lambda(&spec);
    // Computed: -0.1669731 / 0.6669731; listed to 6 digits as -0.166977 / 0.666977.
    assert!((lm + 0.166_973_1).abs() < 1e-7 && (lp - 0.666_973_1).abs() < 1e-7);
    assert!((lm + 0.166977).abs() < 1e-5 && (lp - 0.666977).abs() < 1e-5);
    let g = spec.mode_coupling(&m1(0));
    assert!((lm * lp + g).abs() < 1e-15);
    let (lm0, lp0) = sw_mode0_lambda(&spec.with_gamma(1e-8));
    assert!(lm0 < 0.0 && lm0 > -1e-12 && (lp0 - 0.5).abs() < 1e-12);
}

#[test]
fn hessian_spectrum() {
    let spec = reference(Speed::Finite(1.0));
    let h1 = sw_hessian_mode_spectrum(&m1(1), &spec);
    assert!((h1.lambda_plus - 0.666858).abs() < 1e-6);
    assert!((h1.lambda_minus - 0.333142).abs() < 1e-6);
    assert!(h1.lower_bound.unwrap() > 0.0);
    let h0 = sw_hessian_mode_spectrum(&m1(0), &spec);
    assert_eq!(h0.lambda_minus, sw_mode0_lambda(&spec).0);
    // Decoupled m = 2: Schrodinger block m^2/2, wave block 1/2.
    let free = sw_hessian_mode_spectrum(&m1(2), &spec.with_gamma(0.0));
    assert_eq!((free.lambda_plus, free.lambda_minus), (2.0, 0.5));
}

#[test]
fn reference_roots_at_c1() {
    let spec = reference(Speed::Finite(1.0));
    let tol = RootTolerances::default();
    let roots = locate_unstable_roots(&m1(1), 3, &spec, None, &tol).unwrap();
    assert_eq!(roots.len(), 1);
    let r = &roots[0];
    assert_eq!(r.m, m1(1));
    assert!(r.residual < 1e-10);
    assert!((r.lambda.re - 0.019925).abs() < 1e-5);
    assert!((r.lambda.im + 0.51409).abs() < 1e-4);
    for p in &r.partners {
        assert!(p.residual < 1e-10, "partner {:?}", p);
    }
    assert_eq!(unstable_mode_set(&roots), counting_breakdown(&m1(1), 3, &spec).unwrap().unstable_modes);
}

#[test]
fn predicted_rate_refuses_stable_config() {
    let spec = reference(Speed::Finite(1.0));
    assert!(matches!(
        growth_rate_predicted(&m1(0), &spec, 3, &RootTolerances::default()),
        Err(Error::NoUnstableSpectrum)
    ));
}

#[test]
fn predicted_rate_even_in_k() {
    let spec = reference(Speed::Finite(1.0));
    let tol = RootTolerances::default();
    let (a, _) = growth_rate_predicted(&m1(1), &spec, 3, &tol).unwrap();
    let (b, _) = growth_rate_predicted(&m1(-1), &spec, 3, &tol).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn decoupled_has_no_roots() {
    let spec = CouplingSpec::reference(0.0, Speed::Finite(1.0));
    let rect = Rect { re_min: 1e-3, re_max: 3.0, im_min: -4.0, im_max: 4.0 };
    let f = DispersionFunction::new(&spec, &m1(1), &m1(1));
    assert!(winding_number(&f, &rect).unwrap().abs() < 1e-9);
    assert!(dispersion_root_find(&m1(1), &m1(1), &spec, &rect, &RootTolerances::default())
        .unwrap()
        .is_empty());
}

#[test]
fn hartree_limit_matches_closed_form() {
    for (gamma, k) in [(0.3, 0), (0.5, 1), (1.0, 2)] {
        let spec = CouplingSpec::reference(gamma, Speed::Infinite);
        let c = spec.constants();
        let v = mode_eigenvalues(&m1(k), &m1(1), &c, &spec.sigma1);
        let rect = Rect::default_for(&spec, &m1(k), &m1(1));
        let roots = dispersion_root_find(&m1(1), &m1(k), &spec, &rect, &RootTolerances::default());
        if v.lambda_plus.re > rect.re_min {
            let roots = roots.unwrap();
            assert_eq!(roots.len(), 1, "gamma {gamma}");
            assert!((roots[0].lambda - v.lambda_plus).norm() < 1e-10);
        } else {
            assert!(roots.unwrap().is_empty());
        }
    }
}

#[test]
fn large_c_matches_hartree() {
    let spec = CouplingSpec::reference(0.5, Speed::Finite(1e6));
    let h = spec.with_c(Speed::Infinite);
    let v = mode_eigenvalues(&m1(1), &m1(1), &h.constants(), &h.sigma1);
    let roots = locate_unstable_roots(&m1(1), 3, &spec, None, &RootTolerances::default()).unwrap();
    assert!((roots[0].lambda - v.lambda_plus).norm() < 1e-6);
}

#[test]
fn rejects_bad_rectangle() {
    let spec = reference(Speed::Finite(1.0));
    let rect = Rect { re_min: -1.0, re_max: 1.0, im_min: -1.0, im_max: 1.0 };
    assert!(dispersion_root_find(&m1(1), &m1(1), &spec, &rect, &RootTolerances::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cubic_matches_generic_root_finder(
        gamma in 0.01f64..0.149, k in -4i64..=4, m in 1i64..=3, a1 in 0.0f64..0.5, a2 in 0.0f64..0.5,
    ) {
        let sig = profile(1.0, &[(1, a1), (2, a2), (3, 1.0 - a1 - a2)]);
        let spec = CouplingSpec::reference(gamma, Speed::Finite(1.0)).with_sigma1(sig).unwrap();
        prop_assume!(spec.constants().margin > 0.0 && spec.sigma1.coeff(&m1(m)) != 0.0);
        let r = cubic_report(&m1(m), &m1(k), &spec).unwrap();
        let want = cubic_roots_oracle(r.b, r.c_coef, r.d_coef);
        for (a, b) in r.roots.iter().zip(want) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
        prop_assert!(r.discriminant > 0.0);
        prop_assert!(r.ordering_ok);
        prop_assert!((r.p_half - r.p_half_closed).abs() <= 1e-12 * (1.0 + r.p_half.abs()));
        prop_assert!(r.p_half != 0.0);
        let disp = (m * m * m * m - 4 * (k * m) * (k * m)) as f64;
        prop_assert_eq!(r.negative_count_contrib == 1, disp <= 0.0);
        let neg = want.iter().filter(|mu| **mu + 0.5 * (m * m) as f64 <= 0.0).count() as u32;
        prop_assert_eq!(neg, r.negative_count_contrib);
    }

    #[test]
    fn counting_identity(gamma in 0.0f64..0.149, k in -4i64..=4, a1 in 0.0f64..1.0, j in 1i64..=4) {
        let sig = profile(1.0, &[(j, a1)]);
        let spec = CouplingSpec::reference(gamma, Speed::Finite(1.0)).with_sigma1(sig).unwrap();
        prop_assume!(spec.constants().margin > 0.0);
        let r = counting_breakdown(&m1(k), 4, &spec).unwrap();
        prop_assert_eq!(r.n0 + r.n_minus + r.n_plus + r.n_c_plus, r.n_l);
        if k == 0 {
            prop_assert_eq!((r.n_l, r.n_c_plus), (1, 0));
        }
    }
}
