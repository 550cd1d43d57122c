//! The ten acceptance criteria, one pass/fail line each.

use std::process::Command;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use speccert_core::descent::{
    base_from_discriminant, build_base_2descent, build_base_2isogeny, check_criterion_2descent,
    DescentError, FactorBase, Outcome,
};
use speccert_core::ellcurve::{Curve, Pt};
use speccert_core::exact::{is_square, rat, rat_int, Rat};
use speccert_core::extend::{
    check_prop2_conditions, pipeline_prop5, prepare_prop7, prop7_at, transfer_model, BaseMode,
    HalvingPoint, Obstruction, Parametrization, Prop7Input, Target, Verdict,
};
use speccert_core::field::Field;
use speccert_core::par::Exec;
use speccert_core::poly::{factor_z, parse_bipoly, parse_expr, Poly, RatFn};

type Check = Result<(), String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn t(s: &str) -> RatFn {
    parse_expr(s, "t").unwrap()
}

fn al(s: &str) -> RatFn {
    parse_expr(s, "alpha").unwrap()
}

fn pt(x: i64, y: i64) -> Pt<Rat> {
    Pt::new(rat_int(x), rat_int(y))
}

fn running() -> Curve<RatFn> {
    Curve::short(t("-t^2"), t("t^2")).unwrap()
}

fn two_torsion_param() -> Parametrization {
    Parametrization {
        u: al("1/(alpha - alpha^3)"),
        v: al("1/(1 - alpha^2)"),
        target: Target::TwoTorsion,
    }
}

fn prop7_input() -> Prop7Input {
    Prop7Input {
        curve: running(),
        point: ("P".into(), Pt::new(t("t"), t("t"))),
        param: Parametrization {
            u: al("4*alpha^3*(alpha+2)/(alpha^2+2*alpha-1)^2"),
            v: al("4*alpha^2*(alpha+2)/(alpha^2+2*alpha-1)^2"),
            target: Target::Factor(
                parse_bipoly("a^4+2*t^2*a^2-8*t^2*a+t^4-t*(4*a^3-4*t^2*a+4*t^2)", "t", "a").unwrap(),
            ),
        },
        halving: HalvingPoint::OnDivisionCurve {
            x: parse_bipoly("a", "t", "a").unwrap(),
            y: parse_bipoly("(a^3-3*a^2*t+a*t^2+t^3-2*t^2)/(2*t)", "t", "a").unwrap(),
        },
        extra_gens: vec![("Q".into(), Pt::new(t("0"), t("t")))],
    }
}

fn two_torsion_injective() -> Check {
    let c = pipeline_prop5(&running(), &two_torsion_param(), &rat(-3, 2), BaseMode::Discriminant, Exec::Parallel)
        .map_err(|e| e.to_string())?;
    ensure(c.verdict == Verdict::Injective, || format!("verdict {:?}", c.verdict))?;
    ensure(c.t0 == Some(rat(8, 15)), || format!("t0 {:?}", c.t0))?;
    let values: Vec<Rat> = c
        .evidence
        .iter()
        .filter(|e| e.kind == "generator-value")
        .map(|e| parse_expr(&e.result, "t").unwrap().as_constant().unwrap())
        .collect();
    for v in [rat(3, 2), rat(5, 2), rat(1, 2), rat(23, 4), rat(11, 4)] {
        ensure(values.iter().any(|x| x.abs() == v), || format!("value {v} missing from {values:?}"))?;
    }
    let products: Vec<&str> = c
        .evidence
        .iter()
        .filter(|e| e.kind == "subset-product")
        .map(|e| e.result.as_str())
        .collect();
    ensure(products.len() == 63 && products.iter().all(|r| *r == "nonsquare"), || {
        format!("{} products: {products:?}", products.len())
    })
}

fn two_torsion_square_witness() -> Check {
    let c = pipeline_prop5(&running(), &two_torsion_param(), &rat_int(-2), BaseMode::Discriminant, Exec::Parallel)
        .map_err(|e| e.to_string())?;
    ensure(c.verdict == Verdict::Indeterminate, || format!("verdict {:?}", c.verdict))?;
    ensure(c.t0 == Some(rat(1, 6)), || format!("t0 {:?}", c.t0))?;
    match &c.obstruction {
        Some(Obstruction::SquareProduct { factors, value, .. }) => {
            ensure(value.is_one(), || format!("witness value {value}"))?;
            ensure(factors == &["-1", "alpha + 1"], || format!("witness class {factors:?}"))
        }
        other => Err(format!("obstruction {other:?}")),
    }
}

fn cleared_model() -> Check {
    let m = transfer_model(&running(), &two_torsion_param().u).map_err(|e| e.to_string())?;
    let d = al("alpha - alpha^3");
    let want = Curve::short(d.pow(2).negate(), d.pow(4)).unwrap();
    ensure(m.cleared == want, || format!("E'' = {}", m.cleared.render("alpha")))?;
    let base = base_from_discriminant(&m.cleared).map_err(|e| e.to_string())?;
    let mut got: Vec<Poly> = base.polys().into_iter().cloned().collect();
    let mut phi: Vec<Poly> = ["-1", "alpha", "alpha-1", "alpha+1", "3*alpha^2-4", "3*alpha^2-1"]
        .iter()
        .map(|s| al(s).as_poly().unwrap().clone())
        .collect();
    got.sort_by(|a, b| a.canonical_cmp(b));
    phi.sort_by(|a, b| a.canonical_cmp(b));
    ensure(got == phi, || format!("base {}", base.render("alpha").join(", ")))?;
    let root = al("alpha^2 - alpha^4");
    ensure(m.cleared.two_torsion_cubic().eval(&root).is_zero(), || "x = alpha^2 - alpha^4 is not a root".into())
}

fn doubling_729() -> Check {
    let e = Curve::short(rat_int(-729), rat_int(729)).unwrap();
    ensure(e.double(&pt(-9, 81)) == pt(27, 27), || format!("2(-9,81) = {:?}", e.double(&pt(-9, 81))))?;
    let h = e.halve_q(&pt(27, 27)).map_err(|e| e.to_string())?;
    ensure(h == [pt(-9, 81)], || format!("halves {h:?}"))
}

fn halving_injective() -> Check {
    let input = prop7_input();
    let setup = prepare_prop7(&input).map_err(|e| e.to_string())?;
    let ep = &setup.model.transferred;
    ensure(ep.double(&setup.halving) == setup.embedded[0].1, || "2R' != P'".into())?;
    let want = Pt::new(
        al("4*alpha^2*(alpha+2)/(alpha^2+2*alpha-1)^2"),
        al("4*alpha^3*(alpha+2)*(alpha^2-3)/(alpha^2+2*alpha-1)^3"),
    );
    ensure(setup.halving == want, || format!("R' = {}", setup.halving.render("alpha")))?;
    let tr = check_prop2_conditions(ep, &setup.gens, &rat_int(-3), Exec::Parallel).map_err(|e| e.to_string())?;
    ensure(tr.sums.len() == 3 && tr.sums.iter().all(|s| s.halves.is_empty()), || {
        "a subset sum is divisible by 2".into()
    })?;
    ensure(tr.fiber_two_torsion.is_empty(), || "E_27 has rational 2-torsion".into())?;
    let c = prop7_at(&input, &setup, &rat_int(-3), Exec::Parallel).map_err(|e| e.to_string())?;
    ensure(c.verdict == Verdict::Injective && c.t0 == Some(rat_int(27)), || {
        format!("verdict {:?} at {:?}", c.verdict, c.t0)
    })
}

fn halving_obstruction() -> Check {
    let input = prop7_input();
    let setup = prepare_prop7(&input).map_err(|e| e.to_string())?;
    let c = prop7_at(&input, &setup, &rat_int(-1), Exec::Parallel).map_err(|e| e.to_string())?;
    ensure(c.verdict == Verdict::Indeterminate, || format!("verdict {:?}", c.verdict))?;
    let fiber = setup.model.transferred.specialize(&rat_int(-1)).unwrap();
    ensure(fiber == Curve::short(rat_int(-1), rat_int(1)).unwrap(), || "wrong fiber".into())?;
    match &c.obstruction {
        Some(Obstruction::Halving { generators, point, half }) => {
            ensure(generators == &["P/2", "Q"], || format!("sum {generators:?}"))?;
            ensure(*half == pt(1, 1), || format!("half {half:?}"))?;
            ensure(fiber.double(half) == *point, || "2(1,1) is not the sum".into())
        }
        other => Err(format!("obstruction {other:?}")),
    }
}

fn fiber_two_torsion() -> Check {
    let e = Curve::short(t("-(t^2+27)"), t("10*t^2+48*t+90")).unwrap();
    let gens: Vec<(String, Pt<RatFn>)> = [("P1", "9", "t+24"), ("P2", "6", "2*t+12"), ("P3", "1", "3*t+8"), ("P4", "t+3", "4*t+6")]
        .iter()
        .map(|(n, x, y)| (n.to_string(), Pt::new(t(x), t(y))))
        .collect();
    let tr = check_prop2_conditions(&e, &gens, &rat_int(30), Exec::Parallel).map_err(|e| e.to_string())?;
    ensure(tr.sums.len() == 15 && tr.mod2_injective, || "condition 2 fails".into())?;
    ensure(tr.generic_two_torsion.is_empty(), || "E(Q(t))[2] nontrivial".into())?;
    ensure(tr.fiber_two_torsion == [pt(15, 0)], || format!("fiber 2-torsion {:?}", tr.fiber_two_torsion))?;
    ensure(!tr.holds(), || "verdict should be Indeterminate".into())
}

fn halve_rational() -> Check {
    let e = Curve::short(rat_int(-4), rat_int(4)).unwrap();
    let h = e.halve_q(&pt(0, 2)).map_err(|e| e.to_string())?;
    ensure(h == [pt(2, 2)], || format!("halves {h:?}"))?;
    ensure(e.double(&pt(2, 2)) == pt(0, 2), || "2(2,2) != (0,2)".into())
}

fn oracle_square(q: &Rat) -> bool {
    let m: BigInt = q.numer() * q.denom();
    !m.is_negative() && {
        let r = m.sqrt();
        &r * &r == m
    }
}

/// Literal pair enumeration: every nonidentity `(f, g)` has a nonsquare entry.
fn pair_oracle(base: &FactorBase, t0: &Rat) -> bool {
    let vals: Vec<Rat> = base.polys().iter().map(|p| p.eval(t0)).collect();
    let n = 1usize << vals.len();
    let prod = |m: usize| {
        (0..vals.len())
            .filter(|i| m >> i & 1 == 1)
            .fold(Rat::one(), |a, i| a * &vals[i])
    };
    let squares: Vec<bool> = (0..n).map(|m| oracle_square(&prod(m))).collect();
    (0..n).all(|f| (0..n).all(|g| (f == 0 && g == 0) || !squares[f] || !squares[g]))
}

fn pair_reduction() -> Check {
    let p = |s: &str| t(s).as_poly().unwrap().clone();
    let mut bases = vec![
        build_base_2descent(&p("0"), &p("t"), &p("-t")).unwrap(),
        build_base_2descent(&p("0"), &p("1"), &p("-1")).unwrap(),
        build_base_2descent(&p("0"), &p("t"), &p("4*t")).unwrap(),
    ];
    let (phi, dual) = build_base_2isogeny(&p("0"), &p("-t")).unwrap();
    bases.extend([phi, dual]);
    let mut compared = 0;
    for base in bases.iter().filter(|b| b.len() <= 4) {
        for n in -40..=40 {
            for d in 1..=5 {
                let t0 = rat(n, d);
                match check_criterion_2descent(base, &t0, Exec::Sequential) {
                    Ok(r) => {
                        let want = pair_oracle(base, &t0);
                        ensure((r.outcome == Outcome::Holds) == want, || format!("base {base} at {t0}"))?;
                        compared += 1;
                    }
                    Err(DescentError::Vanishes { .. }) => {}
                    Err(e) => return Err(e.to_string()),
                }
            }
        }
    }
    ensure(compared > 1000, || format!("only {compared} comparisons"))
}

fn property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let curves = [
        (Curve::short(rat_int(-729), rat_int(729)).unwrap(), pt(27, 27), pt(-9, 81)),
        (Curve::short(rat_int(-1), rat_int(1)).unwrap(), pt(1, 1), pt(0, 1)),
        (Curve::short(rat_int(-927), rat_int(10530)).unwrap(), pt(9, 54), pt(6, 72)),
        (Curve::short(rat_int(-4), rat_int(4)).unwrap(), pt(0, 2), pt(2, 2)),
    ];
    for (e, p, q) in &curves {
        for _ in 0..100 {
            let mut pick = || e.add(&e.smul(rng.random_range(-4..=4), p), &e.smul(rng.random_range(-4..=4), q));
            let (a, b, c) = (pick(), pick(), pick());
            ensure(e.add(&e.add(&a, &b), &c) == e.add(&a, &e.add(&b, &c)), || "associativity".into())?;
            ensure(e.add(&a, &b) == e.add(&b, &a), || "commutativity".into())?;
            ensure(e.add(&a, &e.neg(&a)).is_infinity(), || "inverse".into())?;
            ensure(e.contains(&a), || "closure".into())?;
        }
    }
    for _ in 0..200 {
        let deg = rng.random_range(0..=10);
        let cs: Vec<i64> = (0..=deg).map(|_| rng.random_range(-1000..=1000)).collect();
        let f = Poly::from_ints(&cs);
        if f.is_zero() {
            continue;
        }
        let fz = factor_z(&f).map_err(|e| e.to_string())?;
        ensure(fz.product() == f, || format!("factor_z does not reconstruct {}", f.render("t")))?;
    }
    for _ in 0..1000 {
        let q = rat(rng.random_range(-10_000..=10_000), rng.random_range(1..=10_000));
        let r = rat(rng.random_range(1..=10_000), rng.random_range(1..=10_000));
        ensure(is_square(&q) == is_square(&(&q * &r * &r)), || format!("scaling {q} by {r}"))?;
        ensure(is_square(&q) == oracle_square(&q), || format!("square test on {q}"))?;
    }
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/two_torsion.toml");
    let runs: Vec<Vec<u8>> = (0..3)
        .map(|_| {
            Command::new(env!("CARGO_BIN_EXE_speccert"))
                .args(["--job", fixture])
                .output()
                .expect("binary runs")
                .stdout
        })
        .collect();
    ensure(!runs[0].is_empty() && runs[0] == runs[1] && runs[1] == runs[2], || {
        "certificates differ across runs".into()
    })
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("1 two-torsion route injective at -3/2", two_torsion_injective),
        ("2 two-torsion route square witness at -2", two_torsion_square_witness),
        ("3 cleared model and discriminant base", cleared_model),
        ("4 doubling and halving on E_27", doubling_729),
        ("5 halving route injective at -3", halving_injective),
        ("6 halving route obstruction at -1", halving_obstruction),
        ("7 four-generator transcript at 30", fiber_two_torsion),
        ("8 rational half of (0, 2)", halve_rational),
        ("9 single-base criterion vs pair enumeration", pair_reduction),
        ("10 property suites", property_suites),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("criterion {name}: PASS"),
            Err(e) => {
                println!("criterion {name}: FAIL ({e})");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
