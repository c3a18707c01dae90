use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use swstab::dynamics::{
    evolve_hartree, evolve_sw_field, evolve_sw_memory, InitialFieldContribution, MemoryOptions,
    SolverOptions,
};
use swstab::{Mode, Speed};
use swstab_bench::{perturbed_state, reference_spec, short_grid};

const STEPS: usize = 50;

fn solvers(c: &mut Criterion) {
    let spec = reference_spec(1.0);
    let opts = SolverOptions::new(Mode::one_d(1), 0).light();
    let mut group = c.benchmark_group(format!("{STEPS} steps"));
    group.sample_size(20);
    for n_x in [64, 256] {
        let grid = short_grid(n_x, STEPS);
        let state = perturbed_state(&spec, &grid);
        group.bench_function(format!("field n_x={n_x}"), |b| {
            b.iter(|| evolve_sw_field(black_box(&state), &spec, &grid, &opts).unwrap())
        });
        let init = InitialFieldContribution::from_state(&state, &spec).unwrap();
        group.bench_function(format!("memory n_x={n_x}"), |b| {
            b.iter(|| {
                evolve_sw_memory(black_box(&state), &init, &spec, &grid, &opts, &MemoryOptions::default())
                    .unwrap()
            })
        });
        let hspec = spec.with_c(Speed::Infinite);
        group.bench_function(format!("hartree n_x={n_x}"), |b| {
            b.iter(|| evolve_hartree(black_box(&state.u), &hspec, &grid, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, solvers);
criterion_main!(benches);
