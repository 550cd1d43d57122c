//! The single-base subset-product test against the literal pair condition:
//! every nonidentity pair `(f, g)` in the group generated by the base has
//! `f(t0)` or `g(t0)` nonsquare.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use speccert_core::descent::{
    build_base_2descent, build_base_2isogeny, check_criterion_2descent, check_criterion_2isogeny,
    DescentError, FactorBase, Outcome,
};
use speccert_core::exact::Rat;
use speccert_core::par::Exec;
use speccert_core::poly::{parse_expr, Poly};

fn p(s: &str) -> Poly {
    parse_expr(s, "t").unwrap().as_poly().unwrap().clone()
}

fn horner(poly: &Poly, t0: &Rat) -> Rat {
    poly.coeffs()
        .iter()
        .rev()
        .fold(Rat::zero(), |acc, c| acc * t0 + c)
}

/// `n/d` in lowest terms is a square iff `n*d` is a nonnegative square.
fn oracle_square(q: &Rat) -> bool {
    let m: BigInt = q.numer() * q.denom();
    if m.is_negative() {
        return false;
    }
    let r = m.sqrt();
    &r * &r == m
}

fn subset_value(values: &[Rat], mask: usize) -> Rat {
    (0..values.len())
        .filter(|i| mask >> i & 1 == 1)
        .fold(Rat::one(), |acc, i| acc * &values[i])
}

/// Literal pair enumeration over `G x G`, identity excluded.
fn pair_condition(base: &FactorBase, t0: &Rat) -> bool {
    let values: Vec<Rat> = base.polys().iter().map(|g| horner(g, t0)).collect();
    let n = 1usize << values.len();
    let products: Vec<Rat> = (0..n).map(|m| subset_value(&values, m)).collect();
    (0..n).all(|f| {
        (0..n).all(|g| {
            (f == 0 && g == 0) || !oracle_square(&products[f]) || !oracle_square(&products[g])
        })
    })
}

fn group_nonsquare(base: &FactorBase, t0: &Rat) -> bool {
    let values: Vec<Rat> = base.polys().iter().map(|g| horner(g, t0)).collect();
    (1..1usize << values.len()).all(|m| !oracle_square(&subset_value(&values, m)))
}

fn vanishes(base: &FactorBase, t0: &Rat) -> bool {
    base.polys().iter().any(|g| horner(g, t0).is_zero())
}

fn descent_fixtures() -> Vec<FactorBase> {
    let triples = [
        ("0", "t", "-t"),
        ("0", "1", "-1"),
        ("0", "t", "4*t"),
        ("0", "t^2", "-1"),
        ("t", "-t", "t+1"),
        ("0", "t+1", "-t-1"),
    ];
    let bases: Vec<FactorBase> = triples
        .iter()
        .map(|(a, b, c)| build_base_2descent(&p(a), &p(b), &p(c)).unwrap())
        .collect();
    assert!(bases.iter().all(|b| b.len() <= 4));
    bases
}

fn isogeny_fixtures() -> Vec<(FactorBase, FactorBase)> {
    [("0", "-t"), ("t", "t"), ("1", "t^2+1"), ("t", "-1")]
        .iter()
        .map(|(a, b)| build_base_2isogeny(&p(a), &p(b)).unwrap())
        .collect()
}

fn agree_descent(base: &FactorBase, t0: &Rat, exec: Exec) {
    match check_criterion_2descent(base, t0, exec) {
        Ok(report) => {
            assert!(!vanishes(base, t0));
            let expected = pair_condition(base, t0);
            assert_eq!(report.outcome == Outcome::Holds, expected, "base {base} at {t0}");
            assert_eq!(expected, group_nonsquare(base, t0));
        }
        Err(DescentError::Vanishes { .. }) => assert!(vanishes(base, t0)),
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn fixture_bases_on_a_grid() {
    for base in descent_fixtures() {
        for num in -30..=30 {
            for den in 1..=6 {
                let t0 = Rat::new(num.into(), BigInt::from(den));
                agree_descent(&base, &t0, Exec::Sequential);
            }
        }
    }
}

fn arb_t0() -> impl Strategy<Value = Rat> {
    (-500i64..=500, 1i64..=60).prop_map(|(n, d)| Rat::new(n.into(), d.into()))
}

fn arb_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-12i64..=12, 1..=3).prop_map(|cs| Poly::from_ints(&cs))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn fixture_bases_random_points(t0 in arb_t0(), which in 0usize..6) {
        agree_descent(&descent_fixtures()[which], &t0, Exec::Parallel);
    }

    #[test]
    fn random_bases(e1 in arb_poly(), e2 in arb_poly(), e3 in arb_poly(), t0 in arb_t0()) {
        prop_assume!(e1 != e2 && e2 != e3 && e1 != e3);
        let base = build_base_2descent(&e1, &e2, &e3).unwrap();
        prop_assume!(base.len() <= 4);
        agree_descent(&base, &t0, Exec::Sequential);
    }

    #[test]
    fn isogeny_sides(t0 in arb_t0(), which in 0usize..4) {
        let (phi, dual) = &isogeny_fixtures()[which];
        match check_criterion_2isogeny(phi, dual, &t0, Exec::Sequential) {
            Ok(report) => {
                let expected = group_nonsquare(phi, &t0) && group_nonsquare(dual, &t0);
                prop_assert_eq!(report.outcome == Outcome::Holds, expected);
            }
            Err(DescentError::Vanishes { .. }) => {
                prop_assert!(vanishes(phi, &t0) || vanishes(dual, &t0));
            }
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
