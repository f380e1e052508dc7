use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use icausal::par::{self, Execution};
use icausal::protocols::{implement_nonlocal_channel, teleport, Direction};
use icausal::qcore::random::Sampler;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn teleport_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("teleport_batch");
    for m in [2usize, 3, 4] {
        let mut s = Sampler::new(m as u64);
        let inputs: Vec<_> = (0..128).map(|_| s.state(&[m, 5])).collect();
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, m), &inputs, |b, inputs| {
                b.iter(|| par::map(mode, inputs.clone(), |psi| black_box(teleport(m, &psi, Direction::Forward).unwrap())))
            });
        }
    }
    group.finish();
}

fn channel_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("channel_batch");
    group.sample_size(20);
    let mut s = Sampler::new(99);
    let cases: Vec<_> = (0..16).map(|_| (s.density(&[2, 3], 3), s.channel(6, 2))).collect();
    for (name, mode) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| par::map(mode, cases.clone(), |(rho, ch)| black_box(implement_nonlocal_channel(&rho, &ch).unwrap())))
        });
    }
    group.finish();
}

criterion_group!(benches, teleport_batch, channel_batch);
criterion_main!(benches);
