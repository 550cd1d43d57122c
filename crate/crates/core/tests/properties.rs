use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use speccert_core::ellcurve::{Curve, Pt};
use speccert_core::exact::{is_square, rat, rat_int, sqrt_rat, Rat};
use speccert_core::extend::{
    prepare_prop7, HalvingPoint, Parametrization, Prop7Input, Target,
};
use speccert_core::poly::{factor_z, parse_bipoly, parse_expr, Poly, RatFn};

fn pt(x: i64, y: i64) -> Pt<Rat> {
    Pt::new(rat_int(x), rat_int(y))
}

/// Curves over Q with two known points each.
fn fixture_curves() -> Vec<(Curve<Rat>, Pt<Rat>, Pt<Rat>)> {
    vec![
        (Curve::short(rat_int(-729), rat_int(729)).unwrap(), pt(27, 27), pt(-9, 81)),
        (Curve::short(rat_int(-1), rat_int(1)).unwrap(), pt(1, 1), pt(0, 1)),
        (Curve::short(rat_int(-927), rat_int(10530)).unwrap(), pt(9, 54), pt(6, 72)),
        (Curve::short(rat_int(-4), rat_int(4)).unwrap(), pt(0, 2), pt(2, 2)),
    ]
}

fn combo(e: &Curve<Rat>, p: &Pt<Rat>, q: &Pt<Rat>, a: i64, b: i64) -> Pt<Rat> {
    e.add(&e.smul(a, p), &e.smul(b, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn group_law_axioms(which in 0usize..4, k in prop::array::uniform6(-4i64..=4)) {
        let curves = fixture_curves();
        let (e, p, q) = &curves[which];
        let a = combo(e, p, q, k[0], k[1]);
        let b = combo(e, p, q, k[2], k[3]);
        let c = combo(e, p, q, k[4], k[5]);
        for x in [&a, &b, &c] {
            prop_assert!(e.contains(x));
        }
        prop_assert_eq!(e.add(&e.add(&a, &b), &c), e.add(&a, &e.add(&b, &c)));
        prop_assert_eq!(e.add(&a, &b), e.add(&b, &a));
        prop_assert_eq!(e.add(&a, &Pt::Infinity), a.clone());
        prop_assert!(e.add(&a, &e.neg(&a)).is_infinity());
        prop_assert_eq!(e.double(&a), e.add(&a, &a));
        prop_assert_eq!(e.sub(&e.add(&a, &b), &b), a.clone());
    }
}

fn t(s: &str) -> RatFn {
    parse_expr(s, "t").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn group_law_over_function_field(k in prop::array::uniform6(-2i64..=2)) {
        let e = Curve::short(t("-t^2"), t("t^2")).unwrap();
        let p = Pt::new(t("t"), t("t"));
        let q = Pt::new(t("0"), t("t"));
        let mk = |a: i64, b: i64| e.add(&e.smul(a, &p), &e.smul(b, &q));
        let (a, b, c) = (mk(k[0], k[1]), mk(k[2], k[3]), mk(k[4], k[5]));
        prop_assert!(e.contains(&a));
        prop_assert_eq!(e.add(&e.add(&a, &b), &c), e.add(&a, &e.add(&b, &c)));
        prop_assert_eq!(e.add(&a, &b), e.add(&b, &a));
    }
}

fn arb_int_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-1000i64..=1000, 1..=11).prop_map(|cs| Poly::from_ints(&cs))
}

fn check_factorization(p: &Poly) -> Result<usize, TestCaseError> {
    let f = factor_z(p).unwrap();
    prop_assert_eq!(&f.product(), p);
    let mut count = 0;
    for (g, m) in &f.factors {
        prop_assert!(g.deg() >= 1);
        prop_assert!(g.lc() > Rat::zero());
        prop_assert!(g.content().is_one());
        count += *m as usize;
    }
    Ok(count)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factor_reconstruction(p in arb_int_poly()) {
        prop_assume!(!p.is_zero());
        check_factorization(&p)?;
    }

    #[test]
    fn factor_of_products(f in arb_int_poly(), g in arb_int_poly()) {
        prop_assume!(f.deg() >= 1 && g.deg() >= 1 && f.deg() + g.deg() <= 10);
        let count = check_factorization(&(&f * &g))?;
        prop_assert!(count >= 2);
    }
}

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-10_000i64..=10_000, 1i64..=10_000).prop_map(|(n, d)| rat(n, d))
}

fn oracle_square(q: &Rat) -> bool {
    let m: BigInt = q.numer() * q.denom();
    !m.is_negative() && {
        let r = m.sqrt();
        &r * &r == m
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn square_scaling(q in arb_rat(), r in arb_rat()) {
        prop_assume!(!r.is_zero());
        let scaled = &q * &r * &r;
        prop_assert_eq!(is_square(&q), is_square(&scaled));
        prop_assert_eq!(is_square(&q), oracle_square(&q));
        prop_assert!(is_square(&(&r * &r)));
        if let Some(s) = sqrt_rat(&scaled) {
            prop_assert_eq!(&s * &s, scaled);
            prop_assert!(s >= Rat::zero());
        }
    }
}

fn al(s: &str) -> RatFn {
    parse_expr(s, "alpha").unwrap()
}

fn prop7_input() -> Prop7Input {
    let phi = parse_bipoly(
        "a^4+2*t^2*a^2-8*t^2*a+t^4-t*(4*a^3-4*t^2*a+4*t^2)",
        "t",
        "a",
    )
    .unwrap();
    Prop7Input {
        curve: Curve::short(t("-t^2"), t("t^2")).unwrap(),
        point: ("P".into(), Pt::new(t("t"), t("t"))),
        param: Parametrization {
            u: al("4*alpha^3*(alpha+2)/(alpha^2+2*alpha-1)^2"),
            v: al("4*alpha^2*(alpha+2)/(alpha^2+2*alpha-1)^2"),
            target: Target::Factor(phi),
        },
        halving: HalvingPoint::OnDivisionCurve {
            x: parse_bipoly("a", "t", "a").unwrap(),
            y: parse_bipoly("(a^3-3*a^2*t+a*t^2+t^3-2*t^2)/(2*t)", "t", "a").unwrap(),
        },
        extra_gens: vec![("Q".into(), Pt::new(t("0"), t("t")))],
    }
}

#[test]
fn embedding_and_halving_commute_with_specialization() {
    let input = prop7_input();
    let setup = prepare_prop7(&input).unwrap();
    let u = &setup.model.u;
    let e = &input.curve;
    let originals = [
        input.point.1.clone(),
        input.extra_gens[0].1.clone(),
        e.add(&input.point.1, &input.extra_gens[0].1),
        e.smul(3, &input.point.1),
    ];
    let embedded: Vec<Pt<RatFn>> = originals
        .iter()
        .map(|p| setup.model.embed_point(p).unwrap())
        .collect();
    for i in 0..embedded.len() {
        for j in i + 1..embedded.len() {
            assert_ne!(embedded[i], embedded[j]);
        }
    }
    let mut tested = 0;
    for n in -12..=12 {
        for d in 1..=4 {
            let a0 = rat(n, d);
            let Ok(t0) = u.eval(&a0) else { continue };
            let (Ok(f0), Ok(f1)) = (e.specialize(&t0), setup.model.transferred.specialize(&a0)) else {
                continue;
            };
            assert_eq!(f0, f1);
            for (p, q) in originals.iter().zip(&embedded) {
                let (Ok(x), Ok(y)) = (p.specialize(&t0), q.specialize(&a0)) else {
                    continue;
                };
                assert_eq!(x, y);
            }
            let r = setup.halving.specialize(&a0).unwrap();
            assert_eq!(f1.double(&r), input.point.1.specialize(&t0).unwrap());
            tested += 1;
        }
    }
    assert!(tested > 50);
}

#[test]
fn cleared_model_is_isomorphic_on_points() {
    let input = prop7_input();
    let setup = prepare_prop7(&input).unwrap();
    let m = &setup.model;
    for (_, p) in &setup.embedded {
        assert!(m.cleared.contains(&m.to_cleared(p)));
    }
    let r = m.to_cleared(&setup.halving);
    assert_eq!(m.cleared.double(&r), m.to_cleared(&setup.embedded[0].1));
}
