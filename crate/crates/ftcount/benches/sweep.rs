//! Sequential versus data-parallel pair sweep over the same gadgets.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ftcount::builders::{build_a_state_exrec, build_steane_ec, BuildOptions};
use ftcount::exec::Execution;
use ftcount::malignancy::{count_matrix, Classifier, NoiseMode, Sweep};
use ftcount::pauli::StabilizerCode;

fn sweep(c: &mut Criterion) {
    let code = StabilizerCode::steane();
    let gadgets = [("ec", build_steane_ec(BuildOptions::default())), ("a-state", build_a_state_exrec(BuildOptions::default()))];
    let mut group = c.benchmark_group("count_matrix");
    group.sample_size(10);
    for (name, g) in &gadgets {
        let cl = Classifier::new(g, &code);
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, name), &exec, |b, &exec| {
                b.iter(|| count_matrix(&cl, NoiseMode::Adversarial, Sweep::Reduced, exec).total)
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
