use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use topcert::transform::forbid_set;
use topcert::{
    certify_dominance, certify_top_k, certify_top_quality, plan_top_quality, CertifyOptions,
    DominanceRelation, PlannerOptions,
};
use topcert_bench::{corridor, corridor_plan, switches, switches_plans};

fn single_plan(c: &mut Criterion) {
    let mut group = c.benchmark_group("forbid_one");
    for n in [4, 16, 64] {
        let task = corridor(n);
        let plan = corridor_plan(&task);
        for relation in DominanceRelation::ALL {
            group.bench_with_input(BenchmarkId::new(relation.to_string(), n), &n, |b, _| {
                b.iter(|| {
                    forbid_set(black_box(&task), std::slice::from_ref(&plan), relation).unwrap()
                })
            });
        }
    }
    group.finish();
}

fn composed(c: &mut Criterion) {
    let mut group = c.benchmark_group("forbid_two");
    for n in [3, 6, 9] {
        let task = switches(n);
        let (a, b) = switches_plans(&task);
        let plans = [a, b];
        for relation in [DominanceRelation::Empty, DominanceRelation::Loopless] {
            group.bench_with_input(BenchmarkId::new(relation.to_string(), n), &n, |bench, _| {
                bench.iter(|| forbid_set(black_box(&task), &plans, relation).unwrap())
            });
        }
    }
    group.finish();
}

fn certification(c: &mut Criterion) {
    let options = CertifyOptions::default();
    let mut group = c.benchmark_group("certify");
    group.sample_size(20);
    for n in [8, 16, 32] {
        let task = corridor(n);
        let plan = corridor_plan(&task);
        let q = n as i64;
        group.bench_with_input(BenchmarkId::new("top_quality", n), &n, |b, _| {
            b.iter(|| certify_top_quality(&task, std::slice::from_ref(&plan), q, &options).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("top_k", n), &n, |b, _| {
            b.iter(|| certify_top_k(&task, std::slice::from_ref(&plan), 1, &options).unwrap())
        });
    }
    for n in [3, 5, 7] {
        let task = switches(n);
        let (plan, _) = switches_plans(&task);
        let q = n as i64;
        for parallel in [false, true] {
            let options = CertifyOptions {
                parallel,
                ..CertifyOptions::default()
            };
            let name = if parallel {
                "unordered_parallel"
            } else {
                "unordered"
            };
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| {
                    certify_dominance(
                        &task,
                        std::slice::from_ref(&plan),
                        q,
                        DominanceRelation::Unordered,
                        &options,
                    )
                    .unwrap()
                })
            });
        }
    }
    group.finish();
}

fn planning(c: &mut Criterion) {
    let options = PlannerOptions::default();
    let mut group = c.benchmark_group("plan_top_quality");
    group.sample_size(10);
    for n in [4, 8] {
        let task = corridor(n);
        let q = n as i64 + 2;
        for relation in [DominanceRelation::Empty, DominanceRelation::Loopless] {
            group.bench_with_input(BenchmarkId::new(relation.to_string(), n), &n, |b, _| {
                b.iter(|| plan_top_quality(&task, q, relation, &options).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, single_plan, composed, certification, planning);
criterion_main!(benches);
