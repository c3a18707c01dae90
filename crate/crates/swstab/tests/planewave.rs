//! Plane-wave equilibria and their energies.

use std::f64::consts::PI;

use proptest::prelude::*;
use swstab::dynamics::torus::TorusGrid;
use swstab::planewave::{dispersion_omega, energy_hha, energy_hsw, plane_wave_state, EnergyLedger};
use swstab::{CouplingSpec, GridSpec, Mode, PlaneWave, Speed, C64};

const UPSILON: f64 = 0.111_366_559_936_634_3;

fn reference() -> CouplingSpec {
    CouplingSpec::reference(0.1, Speed::Finite(1.0))
}

fn grid() -> GridSpec {
    GridSpec::new(64, 1, 1e-3, 1.0)
}

#[test]
fn omega_reference_values() {
    let c = reference().constants();
    assert!((dispersion_omega(&Mode::one_d(0), &c) - 0.1113666).abs() < 1e-7);
    assert!((dispersion_omega(&Mode::one_d(1), &c) + 0.3886334).abs() < 1e-7);
    let free = CouplingSpec::reference(0.0, Speed::Finite(1.0)).constants();
    assert_eq!(dispersion_omega(&Mode::one_d(3), &free), -4.5);
}

#[test]
fn dispersion_relation_holds_at_construction() {
    let spec = reference();
    for k in -3..=3 {
        let pw = PlaneWave::new(&spec, Mode::one_d(k)).unwrap();
        let defect = pw.omega + 0.5 * (k * k) as f64 - pw.upsilon_star;
        assert!(defect.abs() < 1e-15);
    }
}

#[test]
fn k0_state_is_one_with_static_profile() {
    let spec = reference();
    let pw = PlaneWave::new(&spec, Mode::one_d(0)).unwrap();
    let st = plane_wave_state(&pw, &spec, &grid()).unwrap();
    assert!(st.u.iter().all(|u| (u - C64::new(1.0, 0.0)).norm() < 1e-15));
    let t = spec.table();
    let psi0 = st.psi(&Mode::one_d(0)).unwrap();
    for j in (0..t.len()).step_by(37) {
        let want = -0.1 * spec.sigma1.mean() * t.shat[j] / (t.r[j] * t.r[j]);
        assert!((psi0[j].re - want).abs() <= 1e-14 * want.abs());
    }
    for m in [1, -1] {
        assert!(st.psi(&Mode::one_d(m)).unwrap().iter().all(|v| v.norm() == 0.0));
    }
}

#[test]
fn decoupled_state_has_no_field() {
    let spec = CouplingSpec::reference(0.0, Speed::Finite(1.0));
    let pw = PlaneWave::new(&spec, Mode::one_d(1)).unwrap();
    let st = plane_wave_state(&pw, &spec, &grid()).unwrap();
    assert!(st.phi_hat.iter().all(|v| v.norm() == 0.0));
    assert_eq!(energy_hsw(&st, &spec).unwrap(), 2.0 * PI / 4.0);
}

#[test]
fn energies_reference_values() {
    let spec = reference();
    let pw0 = PlaneWave::new(&spec, Mode::one_d(0)).unwrap();
    let st0 = plane_wave_state(&pw0, &spec, &grid()).unwrap();
    // (2 pi / 4)(k^2 - Upsilon*) with Upsilon* = 0.02 pi^{3/2}.
    assert!((energy_hsw(&st0, &spec).unwrap() + 0.174_934_183).abs() < 1e-8);
    assert!((energy_hha(&st0.u, 1, &spec).unwrap() + 0.174_934_183).abs() < 1e-8);
    let pw1 = PlaneWave::new(&spec, Mode::one_d(1)).unwrap();
    let st1 = plane_wave_state(&pw1, &spec, &grid()).unwrap();
    assert!((energy_hsw(&st1, &spec).unwrap() - 1.395_862_144).abs() < 1e-8);
}

#[test]
fn hartree_energy_trivial_cases() {
    let spec = reference();
    let zero = vec![C64::new(0.0, 0.0); 64];
    assert_eq!(energy_hha(&zero, 1, &spec).unwrap(), 0.0);
    let tg = TorusGrid::new(1, 64);
    let u: Vec<C64> = (0..64).map(|i| C64::from_polar(1.0, tg.point(i)[0])).collect();
    let free = CouplingSpec::reference(0.0, Speed::Infinite);
    assert!((energy_hha(&u, 1, &free).unwrap() - 2.0 * PI / 4.0).abs() < 1e-13);
}

#[test]
fn two_dimensional_plane_wave_energy() {
    let spec = CouplingSpec::new(
        2,
        3,
        0.1,
        Speed::Finite(1.0),
        swstab::Sigma1Spec::cosine(2).unwrap(),
        swstab::Sigma2Spec::gaussian_default(),
    )
    .unwrap();
    let pw = PlaneWave::new(&spec, Mode::new(&[1, -1])).unwrap();
    let st = plane_wave_state(&pw, &spec, &GridSpec::new(16, 1, 1e-3, 1.0)).unwrap();
    let e = energy_hsw(&st, &spec).unwrap();
    assert!((e - pw.energy()).abs() <= 1e-10 * pw.energy().abs());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn plane_wave_energies_match_closed_form(k in -4i64..=4, gamma in 0.0f64..0.2) {
        let spec = CouplingSpec::reference(gamma, Speed::Finite(1.5));
        let pw = PlaneWave::new(&spec, Mode::one_d(k)).unwrap();
        let st = plane_wave_state(&pw, &spec, &grid()).unwrap();
        let want = 2.0 * PI / 4.0 * ((k * k) as f64 - gamma * gamma * UPSILON / 0.01);
        let scale = want.abs().max(1e-3);
        let led = EnergyLedger::compute(&st, &spec).unwrap();
        prop_assert!((led.h_sw.unwrap() - want).abs() <= 1e-10 * scale);
        prop_assert!((led.h_ha - want).abs() <= 1e-10 * scale);
        prop_assert!((led.l2_mass - PI).abs() <= 1e-13);
        prop_assert!((led.momentum[0] - PI * k as f64).abs() <= 1e-12);
    }
}
