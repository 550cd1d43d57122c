use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use speccert_core::descent::{check_criterion_2descent, FactorBase};
use speccert_core::ellcurve::{Curve, Pt};
use speccert_core::exact::rat;
use speccert_core::extend::check_prop2_conditions;
use speccert_core::par::Exec;
use speccert_core::poly::{parse_expr, Poly, RatFn};

fn t(s: &str) -> RatFn {
    parse_expr(s, "t").unwrap()
}

/// A base with `-1` and the linear factors `t - k`.
fn wide_base(n: i64) -> FactorBase {
    let mut base = FactorBase::units();
    for k in 1..n {
        base.absorb(&Poly::from_ints(&[-k, 1]), "bench").unwrap();
    }
    base
}

fn subset_products(c: &mut Criterion) {
    let mut group = c.benchmark_group("subset-products");
    let t0 = rat(1, 1_000_003);
    for n in [12i64, 16] {
        let base = wide_base(n);
        for (label, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, n), &base, |b, base| {
                b.iter(|| check_criterion_2descent(base, &t0, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn subset_sums(c: &mut Criterion) {
    let mut group = c.benchmark_group("subset-sums");
    group.sample_size(10);
    let e = Curve::short(t("-(t^2+27)"), t("10*t^2+48*t+90")).unwrap();
    let gens: Vec<(String, Pt<RatFn>)> = [
        ("P1", "9", "t+24"),
        ("P2", "6", "2*t+12"),
        ("P3", "1", "3*t+8"),
        ("P4", "t+3", "4*t+6"),
    ]
    .iter()
    .map(|(n, x, y)| (n.to_string(), Pt::new(t(x), t(y))))
    .collect();
    let t0 = rat(30, 1);
    for (label, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_function(label, |b| {
            b.iter(|| check_prop2_conditions(&e, &gens, &t0, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, subset_products, subset_sums);
criterion_main!(benches);
