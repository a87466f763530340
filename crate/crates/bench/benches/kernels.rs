//! Benchmarks for the heavy kernels: local search, the enumeration greedy,
//! the exact-rational LP, pipage rounding, the brute-force oracle, and one
//! full deterministic mechanism run.

use budgetcut::greedy::{greedy_enum_sm, greedy_sm};
use budgetcut::local_search::approx_local_search;
use budgetcut::lp::{pipage_round, solve_lp, CutLpModel};
use budgetcut::mechanisms::det_mech_ucut;
use budgetcut::num::{frac, rat, Rat};
use budgetcut::oracle::{brute_opt, Budget};
use budgetcut_bench::{additive_fixture, cut_fixture, unit_cut_fixture};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_local_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("approx_local_search");
    for n in [8usize, 12, 16] {
        let inst = cut_fixture(n, 21);
        let eps = frac(1, 8);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| approx_local_search(inst, inst.ground(), &eps).unwrap().set)
        });
    }
    group.finish();
}

fn bench_greedy(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy");
    let inst = additive_fixture(12, 22);
    let half = inst.budget() / rat(2);
    group.bench_function("greedy_sm_n12", |b| {
        b.iter(|| greedy_sm(&inst, inst.ground(), &half).0)
    });
    let inst = cut_fixture(10, 23);
    group.bench_function("greedy_enum_sm_n10", |b| {
        b.iter(|| greedy_enum_sm(&inst, inst.ground()))
    });
    group.finish();
}

fn bench_lp(c: &mut Criterion) {
    let mut group = c.benchmark_group("cut_lp");
    group.sample_size(20);
    for n in [8usize, 12] {
        let inst = cut_fixture(n, 24);
        let model = CutLpModel::from_instance(&inst, inst.affordable(inst.ground())).unwrap();
        group.bench_with_input(BenchmarkId::new("solve", n), &model, |b, model| {
            b.iter(|| solve_lp(model).unwrap().objective)
        });
        let solution = solve_lp(&model).unwrap();
        group.bench_with_input(BenchmarkId::new("pipage", n), &model, |b, model| {
            b.iter(|| pipage_round(model, &solution.x).0)
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_opt");
    group.sample_size(20);
    for n in [12usize, 16] {
        let inst = cut_fixture(n, 25);
        let budget = Budget::finite(inst.budget().clone());
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| brute_opt(inst, inst.ground(), &budget).0)
        });
    }
    group.finish();
}

fn bench_mechanism(c: &mut Criterion) {
    let mut group = c.benchmark_group("det_mech_ucut");
    group.sample_size(10);
    let inst = unit_cut_fixture(9, 26);
    group.bench_function("full_run_with_payments_n9", |b| {
        b.iter(|| {
            let res = det_mech_ucut(&inst).unwrap();
            let total: Rat = res.payments.values().cloned().sum();
            (res.winners, total)
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_local_search,
    bench_greedy,
    bench_lp,
    bench_oracle,
    bench_mechanism
);
criterion_main!(benches);
