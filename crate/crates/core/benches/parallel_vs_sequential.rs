use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use negdep::experiments::{run_replications_with, Construction, ExperimentPlan};
use negdep::integrands::IntegrandSpec;
use negdep::negdep::{CriterionBase, CriterionView, PairCounts};
use negdep::randomize::RandomizerKind;
use negdep::sequences::{Family, SequenceSpec};
use negdep::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn pair_counts(c: &mut Criterion) {
    let p = SequenceSpec::new(Family::Halton, 8).generate(4000).unwrap();
    let view = CriterionView::new(&p, &CriterionBase::Uniform(2)).unwrap();
    let mut g = c.benchmark_group("pair_counts");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| PairCounts::compute(&view, 8, 12, exec)));
    }
    g.finish();
}

fn generation(c: &mut Criterion) {
    let spec = SequenceSpec::new(Family::Faure, 12).with_base(13);
    let mut g = c.benchmark_group("faure_generation");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| spec.generate_with(50_000, exec).unwrap()));
    }
    g.finish();
}

fn replications(c: &mut Criterion) {
    let plan = ExperimentPlan::new(
        Construction::Sequence(SequenceSpec::new(Family::Faure, 4).with_base(5)),
        RandomizerKind::OwenScramble,
        IntegrandSpec::G2 { s: 4, c: 0.1 },
        vec![3125, 6250],
    )
    .with_replications(16);
    let mut g = c.benchmark_group("run_replications");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| run_replications_with(&plan, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, pair_counts, generation, replications);
criterion_main!(benches);
