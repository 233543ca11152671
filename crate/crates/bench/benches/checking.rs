use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use faircheck_bench::{coffee, delivery, random_models};
use faircheck_core::lts::ActionSet;
use faircheck_core::mucalc::satisfies;
use faircheck_core::oracle::{oracle_admits_violating, SearchBounds};
use faircheck_core::templates::{CriterionKind, CriterionSpec, DEFAULT_SUBSET_CAP};

fn formulas(c: &mut Criterion) {
    let lts = coffee();
    let t = &delivery(&lts)[0];
    let mut group = c.benchmark_group("coffee");
    for kind in CriterionKind::ALL {
        if kind == CriterionKind::Justness {
            continue;
        }
        let spec = CriterionSpec::named(kind, ActionSet::empty(), None);
        group.bench_function(BenchmarkId::new("build", kind), |b| {
            b.iter(|| spec.build_formula(&lts, black_box(t), DEFAULT_SUBSET_CAP).unwrap())
        });
        let f = spec.build_formula(&lts, t, DEFAULT_SUBSET_CAP).unwrap();
        group.bench_function(BenchmarkId::new("evaluate", kind), |b| {
            b.iter(|| satisfies(&lts, black_box(&f)).unwrap())
        });
        let bounds = SearchBounds::default_for(&lts);
        group.bench_function(BenchmarkId::new("oracle", kind), |b| {
            b.iter(|| oracle_admits_violating(&lts, black_box(t), &spec, &bounds).unwrap())
        });
    }
    group.finish();
}

fn scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("random");
    group.sample_size(20);
    for states in [5, 10, 20] {
        let models = random_models(states, 10);
        let spec = CriterionSpec::named(CriterionKind::WeakFairness, ActionSet::empty(), None);
        group.bench_with_input(BenchmarkId::new("wfa-evaluate", states), &models, |b, models| {
            b.iter(|| {
                for m in models {
                    for t in &m.templates {
                        let f = spec.build_formula(&m.lts, t, DEFAULT_SUBSET_CAP).unwrap();
                        black_box(satisfies(&m.lts, &f).unwrap());
                    }
                }
            })
        });
        group.bench_with_input(BenchmarkId::new("wfa-oracle", states), &models, |b, models| {
            b.iter(|| {
                for m in models {
                    for t in &m.templates {
                        black_box(oracle_admits_violating(&m.lts, t, &spec, &m.bounds).unwrap());
                    }
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, formulas, scaling);
criterion_main!(benches);
