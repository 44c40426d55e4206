use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use polya::urn::{run, sample_multinomial};
use polya::{
    replication_rng, FlowOptions, MeanFieldModel, ReinforcementSpec, RunOptions, ScheduleFamily,
    ScheduleSpec, SeedProvenance, TrajectoryMode,
};

fn urn_steps(c: &mut Criterion) {
    let f = ReinforcementSpec::power(2.0).unwrap();
    let options = RunOptions {
        trajectory: TrajectoryMode::None,
        ..RunOptions::default()
    };
    let seed = SeedProvenance {
        master_seed: 1,
        replication: 0,
    };
    let steps = 10_000;
    let mut group = c.benchmark_group("urn_run");
    group.throughput(Throughput::Elements(steps));
    for d in [3usize, 10] {
        let schedule = ScheduleSpec::new(ScheduleFamily::Constant { c: 1 }, d as f64).unwrap();
        let initial = vec![1.0; d];
        group.bench_with_input(BenchmarkId::new("constant", d), &d, |b, _| {
            b.iter(|| {
                let mut rng = replication_rng(1, 0);
                run(&initial, &f, &schedule, steps, &options, seed, &mut rng).unwrap()
            })
        });
    }
    let schedule = ScheduleSpec::new(ScheduleFamily::Polynomial { p: 1.0 }, 3.0).unwrap();
    group.bench_function("linear/3", |b| {
        b.iter(|| {
            let mut rng = replication_rng(1, 0);
            run(&[1.0; 3], &f, &schedule, steps, &options, seed, &mut rng).unwrap()
        })
    });
    group.finish();
}

fn multinomial(c: &mut Criterion) {
    let mut group = c.benchmark_group("multinomial");
    for n in [1u64, 1_000, 1_000_000_000] {
        let probs = [0.5, 0.3, 0.15, 0.05];
        let mut out = [0u64; 4];
        let mut rng = replication_rng(2, 0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| sample_multinomial(black_box(n), &probs, &mut rng, &mut out))
        });
    }
    group.finish();
}

fn mean_field(c: &mut Criterion) {
    let model = MeanFieldModel::new(3, ReinforcementSpec::power_exp(0.1).unwrap()).unwrap();
    let y0 = [0.2, 0.35, 0.45];
    c.bench_function("flow/power_exp/d3", |b| {
        b.iter(|| model.flow(black_box(&y0), &FlowOptions::default()).unwrap())
    });
    c.bench_function("lyapunov/power_exp/d3", |b| {
        b.iter(|| model.lyapunov(black_box(&y0)).unwrap())
    });
    let model6 = MeanFieldModel::new(6, ReinforcementSpec::power(2.0).unwrap()).unwrap();
    c.bench_function("equilibria_with_stability/d6", |b| {
        b.iter(|| {
            for e in model6.equilibria().unwrap() {
                black_box(model6.jacobian(&e.coordinates).unwrap());
            }
        })
    });
}

criterion_group!(benches, urn_steps, multinomial, mean_field);
criterion_main!(benches);
