use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use swstab::coupling::RadialTable;
use swstab::sw_spec::{cubic_report, locate_unstable_roots, DispersionFunction, RootTolerances};
use swstab::{Mode, Sigma2Spec, C64};
use swstab_bench::reference_spec;

fn kappa_s(c: &mut Criterion) {
    let table = RadialTable::new(&Sigma2Spec::gaussian_default(), 3).unwrap();
    c.bench_function("kappa_s 512 nodes", |b| {
        b.iter(|| table.kappa_s_with_derivative(black_box(C64::new(0.3, 1.7))))
    });
    c.bench_function("radial table build", |b| {
        b.iter(|| RadialTable::new(black_box(&Sigma2Spec::gaussian_default()), 3).unwrap())
    });
}

fn spectral(c: &mut Criterion) {
    let spec = reference_spec(1.0);
    let (k, m) = (Mode::one_d(1), Mode::one_d(1));
    c.bench_function("cubic report", |b| {
        b.iter(|| cubic_report(black_box(&m), black_box(&k), &spec).unwrap())
    });
    let f = DispersionFunction::new(&spec, &k, &m);
    c.bench_function("dispersion function eval", |b| {
        b.iter(|| f.eval(black_box(C64::new(0.02, -0.51))))
    });
    let tol = RootTolerances::default();
    c.bench_function("locate unstable roots k=1", |b| {
        b.iter(|| locate_unstable_roots(black_box(&k), 3, &spec, None, &tol).unwrap())
    });
}

criterion_group!(benches, kappa_s, spectral);
criterion_main!(benches);
