//! Fixtures compiled into the binary and checked by `--selftest`.

use speccert_core::descent::base_from_discriminant;
use speccert_core::ellcurve::{Curve, Pt};
use speccert_core::exact::{rat_int, Rat};
use speccert_core::extend::transfer_model;
use speccert_core::field::Field;
use speccert_core::par::Exec;
use speccert_core::poly::{parse_expr, RatFn};

use crate::cert::{Bundle, Certificate};
use crate::job::load_toml;
use crate::run::{run_job, Options};

pub const TWO_TORSION: &str = include_str!("../fixtures/two_torsion.toml");
pub const HALVING: &str = include_str!("../fixtures/halving.toml");
pub const FOUR_GENERATORS: &str = include_str!("../fixtures/four_generators.toml");
pub const SPECIALIZE27: &str = include_str!("../fixtures/specialize27.toml");
pub const DESCENT2: &str = include_str!("../fixtures/descent2.toml");
pub const ISOGENY2: &str = include_str!("../fixtures/isogeny2.toml");
pub const FACTOR: &str = include_str!("../fixtures/factor.toml");

pub struct Fixture {
    pub name: &'static str,
    pub check: fn(Exec) -> Result<(), String>,
}

pub fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture { name: "two-torsion-injective", check: two_torsion_injective },
        Fixture { name: "two-torsion-square-witness", check: two_torsion_square_witness },
        Fixture { name: "cleared-model", check: cleared_model },
        Fixture { name: "doubling-729", check: doubling_729 },
        Fixture { name: "specialize-27", check: specialize_27 },
        Fixture { name: "halving-injective", check: halving_injective },
        Fixture { name: "halving-obstruction", check: halving_obstruction },
        Fixture { name: "fiber-two-torsion", check: fiber_two_torsion },
        Fixture { name: "halve-rational", check: halve_rational },
        Fixture { name: "descent2-running", check: descent2_running },
        Fixture { name: "isogeny2-running", check: isogeny2_running },
        Fixture { name: "factor-disc", check: factor_disc },
        Fixture { name: "determinism", check: determinism },
    ]
}

/// Run the fixtures whose name contains `filter`; one line each.
pub fn selftest(filter: Option<&str>, exec: Exec) -> (Vec<String>, bool) {
    let mut lines = Vec::new();
    let mut ok = true;
    for f in fixtures() {
        if filter.is_some_and(|s| !f.name.contains(s)) {
            continue;
        }
        match (f.check)(exec) {
            Ok(()) => lines.push(format!("PASS {}", f.name)),
            Err(e) => {
                ok = false;
                lines.push(format!("FAIL {}: {e}", f.name));
            }
        }
    }
    (lines, ok)
}

pub fn run_fixture(name: &str, text: &str, exec: Exec) -> Result<Bundle, String> {
    let (job, src) = load_toml(name, text).map_err(|e| e.to_string())?;
    run_job(&job, &src, Options { exec, timing: false }).map_err(|e| e.to_string())
}

fn expect(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn cert(b: &Bundle, i: usize) -> Result<&Certificate, String> {
    b.certificates
        .get(i)
        .ok_or_else(|| format!("missing certificate {i}"))
}

fn verdict(c: &Certificate, v: &str, t0: &str) -> Result<(), String> {
    expect(c.verdict == v, || format!("verdict {} (expected {v})", c.verdict))?;
    expect(c.t0.as_deref() == Some(t0), || format!("t0 {:?} (expected {t0})", c.t0))
}

fn evidence<'a>(c: &'a Certificate, kind: &'a str) -> impl Iterator<Item = &'a crate::cert::EvidenceDoc> {
    c.evidence.iter().filter(move |e| e.kind == kind)
}

fn two_torsion_injective(exec: Exec) -> Result<(), String> {
    let b = run_fixture("two_torsion.toml", TWO_TORSION, exec)?;
    let c = cert(&b, 0)?;
    verdict(c, "Injective", "8/15")?;
    let values: Vec<&str> = evidence(c, "generator-value").map(|e| e.result.as_str()).collect();
    for v in ["3/2", "5/2", "1/2", "23/4", "11/4"] {
        let neg = format!("-{v}");
        expect(values.iter().any(|x| *x == v || *x == neg), || {
            format!("generator value {v} missing from {values:?}")
        })?;
    }
    let checked: Vec<&str> = evidence(c, "products-checked").map(|e| e.result.as_str()).collect();
    expect(checked == ["63"], || format!("products checked {checked:?}"))?;
    let nonsquare = evidence(c, "subset-product").filter(|e| e.result == "nonsquare").count();
    expect(nonsquare == 63, || format!("{nonsquare} nonsquare products"))
}

fn two_torsion_square_witness(exec: Exec) -> Result<(), String> {
    let b = run_fixture("two_torsion.toml", TWO_TORSION, exec)?;
    let c = cert(&b, 1)?;
    verdict(c, "Indeterminate", "1/6")?;
    let w = c.witness.as_ref().ok_or("no witness")?;
    expect(w.kind == "square-product", || format!("witness kind {}", w.kind))?;
    expect(w.detail.ends_with("-1*(alpha + 1) is the square 1"), || {
        format!("witness {}", w.detail)
    })
}

fn al(s: &str) -> RatFn {
    parse_expr(s, "alpha").expect("fixture expression")
}

fn t(s: &str) -> RatFn {
    parse_expr(s, "t").expect("fixture expression")
}

fn cleared_model(_: Exec) -> Result<(), String> {
    let e = Curve::short(t("-t^2"), t("t^2")).map_err(|e| e.to_string())?;
    let m = transfer_model(&e, &al("1/(alpha - alpha^3)")).map_err(|e| e.to_string())?;
    let d = al("alpha - alpha^3");
    let expected = Curve::short(d.pow(2).negate(), d.pow(4)).map_err(|e| e.to_string())?;
    expect(m.cleared == expected, || format!("E'' = {}", m.cleared.render("alpha")))?;
    let base = base_from_discriminant(&m.cleared).map_err(|e| e.to_string())?;
    let mut got = base.render("alpha");
    got.sort();
    let mut want: Vec<String> = ["-1", "alpha", "alpha - 1", "alpha + 1", "3*alpha^2 - 4", "3*alpha^2 - 1"]
        .iter()
        .map(|s| al(s).as_poly().expect("polynomial").render("alpha"))
        .collect();
    want.sort();
    expect(got == want, || format!("base {got:?}"))?;
    let root = al("alpha^2 - alpha^4");
    expect(m.cleared.contains(&Pt::new(root, RatFn::from_i64(0))), || {
        "(alpha^2 - alpha^4, 0) is not on E''".into()
    })
}

fn pt(x: i64, y: i64) -> Pt<Rat> {
    Pt::new(rat_int(x), rat_int(y))
}

fn doubling_729(_: Exec) -> Result<(), String> {
    let e = Curve::short(rat_int(-729), rat_int(729)).map_err(|e| e.to_string())?;
    expect(e.double(&pt(-9, 81)) == pt(27, 27), || "2(-9,81) != (27,27)".into())?;
    let h = e.halve_q(&pt(27, 27)).map_err(|e| e.to_string())?;
    expect(h == [pt(-9, 81)], || format!("halves {h:?}"))
}

fn specialize_27(exec: Exec) -> Result<(), String> {
    let b = run_fixture("specialize27.toml", SPECIALIZE27, exec)?;
    let c = cert(&b, 0)?;
    verdict(c, "Informational", "27")?;
    let fiber = evidence(c, "fiber").next().ok_or("no fiber")?;
    expect(fiber.result == "y^2 = x^3 - 729*x + 729", || format!("fiber {}", fiber.result))?;
    let p = evidence(c, "point").find(|e| e.operands[0] == "P").ok_or("no P")?;
    expect(p.result == "(27, 27)", || format!("P_27 = {}", p.result))
}

fn halving_injective(exec: Exec) -> Result<(), String> {
    let b = run_fixture("halving.toml", HALVING, exec)?;
    let c = cert(&b, 0)?;
    verdict(c, "Injective", "27")?;
    expect(evidence(c, "doubling").count() == 1, || "no doubling identity".into())?;
    let sums: Vec<&str> = evidence(c, "subset-sum").map(|e| e.result.as_str()).collect();
    expect(sums == ["not divisible by 2"; 3], || format!("subset sums {sums:?}"))?;
    let tt = evidence(c, "fiber-two-torsion").next().ok_or("no 2-torsion record")?;
    expect(tt.result == "[]", || format!("fiber 2-torsion {}", tt.result))
}

fn halving_obstruction(exec: Exec) -> Result<(), String> {
    let b = run_fixture("halving.toml", HALVING, exec)?;
    let c = cert(&b, 1)?;
    verdict(c, "Indeterminate", "-1")?;
    let fiber = evidence(c, "fiber").next().ok_or("no fiber")?;
    expect(fiber.result == "y^2 = x^3 - x + 1", || format!("fiber {}", fiber.result))?;
    let w = c.witness.as_ref().ok_or("no witness")?;
    expect(w.kind == "halving", || format!("witness kind {}", w.kind))?;
    expect(w.detail == "sum of P/2+Q specializes to (-1, 1) = [2](1, 1)", || {
        format!("witness {}", w.detail)
    })
}

fn fiber_two_torsion(exec: Exec) -> Result<(), String> {
    let b = run_fixture("four_generators.toml", FOUR_GENERATORS, exec)?;
    let c = cert(&b, 0)?;
    verdict(c, "Indeterminate", "30")?;
    let sums: Vec<&str> = evidence(c, "subset-sum").map(|e| e.result.as_str()).collect();
    expect(sums.len() == 15 && sums.iter().all(|s| *s == "not divisible by 2"), || {
        format!("subset sums {sums:?}")
    })?;
    let w = c.witness.as_ref().ok_or("no witness")?;
    expect(w.kind == "fiber-two-torsion" && w.detail.ends_with("(15, 0)"), || {
        format!("witness {}", w.detail)
    })
}

fn halve_rational(_: Exec) -> Result<(), String> {
    let e = Curve::short(rat_int(-4), rat_int(4)).map_err(|e| e.to_string())?;
    let h = e.halve_q(&pt(0, 2)).map_err(|e| e.to_string())?;
    expect(h == [pt(2, 2)], || format!("halves {h:?}"))
}

fn descent2_running(exec: Exec) -> Result<(), String> {
    let b = run_fixture("descent2.toml", DESCENT2, exec)?;
    verdict(cert(&b, 0)?, "Injective", "3")?;
    verdict(cert(&b, 1)?, "Indeterminate", "2")?;
    verdict(cert(&b, 2)?, "Indeterminate", "1/2")?;
    let w = cert(&b, 1)?.witness.as_ref().ok_or("no witness")?;
    expect(w.detail == "descent product 2*t is the square 4", || format!("witness {}", w.detail))
}

fn isogeny2_running(exec: Exec) -> Result<(), String> {
    let b = run_fixture("isogeny2.toml", ISOGENY2, exec)?;
    verdict(cert(&b, 0)?, "Injective", "3")?;
    verdict(cert(&b, 1)?, "Injective", "6")
}

fn factor_disc(exec: Exec) -> Result<(), String> {
    let b = run_fixture("factor.toml", FACTOR, exec)?;
    let c = cert(&b, 0)?;
    let factors: Vec<String> = evidence(c, "factor")
        .map(|e| format!("{}^{}", e.operands[0], e.result))
        .collect();
    expect(
        factors == ["t - 1^1", "t + 1^1", "3*t - 2^1", "3*t + 2^1"],
        || format!("factors {factors:?}"),
    )
}

fn determinism(exec: Exec) -> Result<(), String> {
    let runs: Vec<String> = (0..3)
        .map(|_| run_fixture("two_torsion.toml", TWO_TORSION, exec).map(|b| b.to_json()))
        .collect::<Result<_, _>>()?;
    expect(runs[0] == runs[1] && runs[1] == runs[2], || "certificates differ between runs".into())
}
