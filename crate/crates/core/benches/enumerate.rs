use amalgrowth::catalog;
use amalgrowth::growth::{enumerate_balls, with_threads, EnumOptions};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn spheres(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(10);
    for (name, nmax) in [("pgl2z", 40), ("c2*c5", 14)] {
        let entry = catalog::load(name).unwrap();
        let opts = EnumOptions::new(nmax);
        for threads in [1, 0] {
            let label = if threads == 1 { "sequential" } else { "parallel" };
            group.bench_with_input(BenchmarkId::new(label, name), &opts, |b, opts| {
                b.iter(|| with_threads(threads, || enumerate_balls(&entry.spec, &entry.generators, *opts)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, spheres);
criterion_main!(benches);
