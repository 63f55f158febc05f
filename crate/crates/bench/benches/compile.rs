use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mpqc_core::compiler::compile_multi_version;
use mpqc_core::harness::{benchmark, device_27, device_65};
use mpqc_core::partition::generate_compute_units;

fn partition(c: &mut Criterion) {
    let mut group = c.benchmark_group("partition");
    for (id, g) in [("device_27", device_27()), ("device_65", device_65())] {
        for m in [2, 4, 6] {
            group.bench_with_input(BenchmarkId::new(id, m), &g, |b, g| b.iter(|| generate_compute_units(g, m)));
        }
    }
    group.finish();
}

fn multi_version(c: &mut Criterion) {
    let mut group = c.benchmark_group("compile_multi_version");
    group.sample_size(10);
    let g = device_65();
    let ug = generate_compute_units(&g, 4).unwrap();
    for name in ["qft_n4", "qaoa_n6", "ising_n10"] {
        let circuit = benchmark(name).unwrap();
        group.bench_function(name, |b| b.iter(|| compile_multi_version(circuit, &ug, &g)));
    }
    group.finish();
}

criterion_group!(benches, partition, multi_version);
criterion_main!(benches);
