//! Sequential vs rayon execution of the two data-parallel hot loops.
//!
//! Without the `parallel` feature both arms run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kagft::multiplier::empirical_opnorm;
use kagft::par::Execution;
use kagft::params::Params;
use kagft::suite::TestFamily;
use kagft::symbol::MultiplierSymbol;
use kagft::transform::{kernel_sup_estimate, KernelMode, TransformOperator};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn kernel_grid(c: &mut Criterion) {
    let t = TransformOperator::with_default_nodes(&Params::new(1, 0.5, 2.0).unwrap(), 64).unwrap();
    let mut g = c.benchmark_group("kernel_sup_estimate");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| kernel_sup_estimate(black_box(&t), 2.0, 41, KernelMode::Extrapolated, exec))
        });
    }
    g.finish();
}

fn opnorm(c: &mut Criterion) {
    let t = TransformOperator::with_default_nodes(&Params::new(1, 0.5, 2.0).unwrap(), 32).unwrap();
    let h = MultiplierSymbol::power(0.8).unwrap();
    let mut g = c.benchmark_group("empirical_opnorm");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| empirical_opnorm(black_box(&t), &h, 1.25, 2.5, &TestFamily::ALL, 32, 42, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, kernel_grid, opnorm);
criterion_main!(benches);
