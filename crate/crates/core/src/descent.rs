//! Square-class factor bases and the two sufficient criteria for
//! injectivity of specialization: the 2-descent form (full 2-torsion) and
//! the 2-isogeny form (`y^2 = x^3 + a x^2 + b x`).
//!
//! The 2-descent criterion asks that for every nontrivial pair `(f, g)` in
//! the group generated by the base, `f(t0)` or `g(t0)` is a nonsquare. A pair
//! `(f, 1)` with `f` nontrivial and `f(t0)` a square already violates this,
//! and conversely a violating pair has a nontrivial entry that is a square at
//! `t0`. So the pair condition is equivalent to: every nonempty subset
//! product of the base is a nonsquare at `t0`. That single-base test is what
//! is implemented; `tests/descent_oracle.rs` checks it against the literal
//! pair enumeration.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::ellcurve::Curve;
use crate::exact::{self, fmt_rat, ExactError, Rat};
use crate::par::Exec;
use crate::poly::{factor_z, Poly, PolyError, RatFn};

/// Bases larger than this are refused rather than enumerated.
pub const MAX_BASE_SIZE: usize = 24;

/// Generators handled by the low half of the split product table.
const LOW_BITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescentError {
    #[error("roots {0} and {1} coincide; the curve is singular")]
    RepeatedRoot(String, String),
    #[error("a^2 - 4b is a square in Q(t); use the 2-descent criterion")]
    SquareDiscriminant,
    #[error("generator {generator} vanishes at {at}")]
    Vanishes { generator: String, at: String },
    #[error("factor base of size {0} exceeds the limit of {MAX_BASE_SIZE}")]
    BaseTooLarge(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// One square-class generator: `-1`, a prime, or a primitive irreducible
/// polynomial with positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub poly: Poly,
    /// Which input quantities contributed this factor.
    pub origins: Vec<String>,
}

impl Generator {
    pub fn is_unit(&self) -> bool {
        self.poly.is_constant() && self.poly.constant_term() == -Rat::one()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorBase {
    gens: Vec<Generator>,
}

/// A subset of a factor base, as a bit set of generator indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SqClass(pub u64);

impl SqClass {
    pub fn indices(self) -> Vec<usize> {
        (0..64).filter(|i| self.0 >> i & 1 == 1).collect()
    }

    pub fn size(self) -> u32 {
        self.0.count_ones()
    }

    /// Witness order: fewer factors first, then lexicographic index lists.
    fn key(self) -> (u32, Vec<usize>) {
        (self.size(), self.indices())
    }
}

impl FactorBase {
    /// Base containing only `-1`.
    pub fn units() -> Self {
        FactorBase {
            gens: vec![Generator {
                poly: Poly::constant(-Rat::one()),
                origins: vec!["unit".into()],
            }],
        }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn polys(&self) -> Vec<&Poly> {
        self.gens.iter().map(|g| &g.poly).collect()
    }

    fn insert(&mut self, poly: Poly, origin: &str) {
        if let Some(g) = self.gens.iter_mut().find(|g| g.poly == poly) {
            if !g.origins.iter().any(|o| o == origin) {
                g.origins.push(origin.to_string());
            }
            return;
        }
        self.gens.push(Generator {
            poly,
            origins: vec![origin.to_string()],
        });
    }

    /// Adjoin every content prime and irreducible factor of `p`, whatever
    /// its multiplicity.
    pub fn absorb(&mut self, p: &Poly, origin: &str) -> Result<(), DescentError> {
        let f = factor_z(p)?;
        for (q, _) in &f.content {
            self.insert(Poly::constant(Rat::from_integer(q.clone())), origin);
        }
        for (g, _) in &f.factors {
            self.insert(g.clone(), origin);
        }
        self.sort();
        Ok(())
    }

    /// Adjoin the factors of numerator and denominator.
    pub fn absorb_ratfn(&mut self, f: &RatFn, origin: &str) -> Result<(), DescentError> {
        self.absorb(f.num(), origin)?;
        if !f.den().is_constant() {
            self.absorb(f.den(), origin)?;
        }
        Ok(())
    }

    /// `-1` first, then primes ascending, then polynomials in canonical order.
    fn sort(&mut self) {
        self.gens.sort_by(|a, b| {
            let rank = |g: &Generator| match (g.is_unit(), g.poly.is_constant()) {
                (true, _) => 0,
                (false, true) => 1,
                _ => 2,
            };
            rank(a).cmp(&rank(b)).then_with(|| {
                if a.poly.is_constant() && b.poly.is_constant() {
                    a.poly.constant_term().cmp(&b.poly.constant_term())
                } else {
                    a.poly.canonical_cmp(&b.poly)
                }
            })
        });
    }

    /// Product of the generators in `class`.
    pub fn product(&self, class: SqClass) -> Poly {
        class
            .indices()
            .into_iter()
            .fold(Poly::one(), |acc, i| &acc * &self.gens[i].poly)
    }

    pub fn render(&self, var: &str) -> Vec<String> {
        self.gens.iter().map(|g| g.poly.render(var)).collect()
    }
}

impl fmt::Display for FactorBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.render("t").join(", "))
    }
}

/// Base for the 2-descent criterion from the three 2-torsion abscissae.
pub fn build_base_2descent(e1: &Poly, e2: &Poly, e3: &Poly) -> Result<FactorBase, DescentError> {
    let mut base = FactorBase::units();
    for (a, b, label) in [(e1, e2, "e1-e2"), (e2, e3, "e2-e3"), (e1, e3, "e1-e3")] {
        let d = a - b;
        if d.is_zero() {
            return Err(DescentError::RepeatedRoot(a.render("t"), b.render("t")));
        }
        base.absorb(&d, label)?;
    }
    Ok(base)
}

/// Bases for the 2-isogeny criterion on `y^2 = x^3 + a x^2 + b x`: factors
/// of `b`, and factors of `a^2 - 4b`.
pub fn build_base_2isogeny(a: &Poly, b: &Poly) -> Result<(FactorBase, FactorBase), DescentError> {
    let disc = &(a * a) - &b.scale(&Rat::from_integer(4.into()));
    if disc.is_zero() {
        return Err(DescentError::RepeatedRoot("0".into(), "0".into()));
    }
    if crate::poly::sqrt_poly(&disc).is_some() {
        return Err(DescentError::SquareDiscriminant);
    }
    let mut phi = FactorBase::units();
    phi.absorb(b, "b")?;
    let mut dual = FactorBase::units();
    dual.absorb(&disc, "a^2-4b")?;
    Ok((phi, dual))
}

/// Base from the factors of the discriminant divided by 16.
pub fn base_from_discriminant(e: &Curve<RatFn>) -> Result<FactorBase, DescentError> {
    let mut base = FactorBase::units();
    base.absorb_ratfn(&e.disc_over_16(), "disc/16")?;
    Ok(base)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub class: SqClass,
    /// The product evaluated at `t0`; a rational square.
    pub value: Rat,
    pub root: Rat,
}

/// Result of checking one base at one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideReport {
    pub label: String,
    pub base: FactorBase,
    /// Each generator evaluated at `t0`.
    pub values: Vec<Rat>,
    /// Every nonempty subset product at `t0`, indexed by mask minus one.
    pub products: Vec<Rat>,
    pub witness: Option<Witness>,
}

impl SideReport {
    pub fn products_checked(&self) -> usize {
        self.products.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionReport {
    pub at: Rat,
    pub outcome: Outcome,
    pub sides: Vec<SideReport>,
}

impl CriterionReport {
    /// First failing side and its witness.
    pub fn witness(&self) -> Option<(&SideReport, &Witness)> {
        self.sides
            .iter()
            .find_map(|s| s.witness.as_ref().map(|w| (s, w)))
    }
}

fn check_side(label: &str, base: &FactorBase, t0: &Rat, exec: Exec) -> Result<SideReport, DescentError> {
    let n = base.len();
    if n > MAX_BASE_SIZE {
        return Err(DescentError::BaseTooLarge(n));
    }
    let values: Vec<Rat> = base.gens.iter().map(|g| g.poly.eval(t0)).collect();
    if let Some(i) = values.iter().position(|v| v.is_zero()) {
        return Err(DescentError::Vanishes {
            generator: base.gens[i].poly.render("t"),
            at: fmt_rat(t0),
        });
    }
    // product(mask) = high(mask >> LOW) * low(mask & low_mask), each table
    // built by the one-new-factor recurrence
    let low_bits = n.min(LOW_BITS);
    let table = |vals: &[Rat]| {
        let mut t = vec![Rat::one(); 1usize << vals.len()];
        for mask in 1..t.len() {
            let high = usize::BITS - 1 - mask.leading_zeros();
            t[mask] = &t[mask ^ (1 << high)] * &vals[high as usize];
        }
        t
    };
    let low = table(&values[..low_bits]);
    let high = table(&values[low_bits..]);
    let low_mask = (1u64 << low_bits) - 1;
    let checked = exec.map_range(1..1u64 << n, |mask| {
        let v = &high[(mask >> low_bits) as usize] * &low[(mask & low_mask) as usize];
        let r = exact::sqrt_rat(&v);
        (v, r)
    });
    let (products, roots): (Vec<Rat>, Vec<Option<Rat>>) = checked.into_iter().unzip();
    let witness = roots
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().map(|r| (SqClass(i as u64 + 1), r)))
        .min_by_key(|(c, _)| c.key())
        .map(|(class, root)| Witness {
            class,
            value: products[class.0 as usize - 1].clone(),
            root: root.clone(),
        });
    Ok(SideReport {
        label: label.to_string(),
        base: base.clone(),
        values,
        products,
        witness,
    })
}

fn combine(t0: &Rat, sides: Vec<SideReport>) -> CriterionReport {
    let outcome = if sides.iter().all(|s| s.witness.is_none()) {
        Outcome::Holds
    } else {
        Outcome::Fails
    };
    CriterionReport {
        at: t0.clone(),
        outcome,
        sides,
    }
}

/// Every nonempty subset product of `base` must be a nonsquare at `t0`.
pub fn check_criterion_2descent(base: &FactorBase, t0: &Rat, exec: Exec) -> Result<CriterionReport, DescentError> {
    Ok(combine(t0, vec![check_side("descent", base, t0, exec)?]))
}

/// Both bases must pass the subset-product test at `t0`.
pub fn check_criterion_2isogeny(
    phi: &FactorBase,
    dual: &FactorBase,
    t0: &Rat,
    exec: Exec,
) -> Result<CriterionReport, DescentError> {
    Ok(combine(
        t0,
        vec![
            check_side("isogeny", phi, t0, exec)?,
            check_side("dual-isogeny", dual, t0, exec)?,
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};
    use crate::poly::parse_expr;

    fn p(s: &str) -> Poly {
        parse_expr(s, "t").unwrap().as_poly().unwrap().clone()
    }

    fn rendered(b: &FactorBase) -> Vec<String> {
        b.render("t")
    }

    #[test]
    fn descent_bases() {
        let b = build_base_2descent(&p("0"), &p("t"), &p("-t")).unwrap();
        assert_eq!(rendered(&b), ["-1", "2", "t"]);
        let b = build_base_2descent(&p("0"), &p("1"), &p("-1")).unwrap();
        assert_eq!(rendered(&b), ["-1", "2"]);
        let b = build_base_2descent(&p("0"), &p("t"), &p("4*t")).unwrap();
        assert_eq!(rendered(&b), ["-1", "2", "3", "t"]);
        assert!(build_base_2descent(&p("t"), &p("t"), &p("0")).is_err());
    }

    #[test]
    fn isogeny_bases() {
        let (phi, dual) = build_base_2isogeny(&p("0"), &p("-t")).unwrap();
        assert_eq!(rendered(&phi), ["-1", "t"]);
        assert_eq!(rendered(&dual), ["-1", "2", "t"]);
        assert_eq!(
            build_base_2isogeny(&p("3*t"), &p("2*t^2")),
            Err(DescentError::SquareDiscriminant)
        );
    }

    #[test]
    fn descent_checks() {
        let b = build_base_2descent(&p("0"), &p("t"), &p("-t")).unwrap();
        let r = check_criterion_2descent(&b, &rat_int(3), Exec::Sequential).unwrap();
        assert_eq!(r.outcome, Outcome::Holds);
        let mut vals: Vec<Rat> = r.sides[0].products.clone();
        vals.sort();
        let expect: Vec<Rat> = [-6, -3, -2, -1, 2, 3, 6].iter().map(|&v| rat_int(v)).collect();
        assert_eq!(vals, expect);
        let r = check_criterion_2descent(&b, &rat_int(2), Exec::Parallel).unwrap();
        let (_, w) = r.witness().unwrap();
        assert_eq!((w.class.indices(), w.value.clone()), (vec![1, 2], rat_int(4)));
        let r = check_criterion_2descent(&b, &rat_int(4), Exec::Sequential).unwrap();
        let (_, w) = r.witness().unwrap();
        assert_eq!((w.class.indices(), w.value.clone()), (vec![2], rat_int(4)));
        assert!(matches!(
            check_criterion_2descent(&b, &rat_int(0), Exec::Sequential),
            Err(DescentError::Vanishes { .. })
        ));
    }

    #[test]
    fn rational_values() {
        let b = build_base_2descent(&p("0"), &p("t"), &p("-t")).unwrap();
        let r = check_criterion_2descent(&b, &rat(1, 2), Exec::Sequential).unwrap();
        // 2 * 1/2 = 1
        assert_eq!(r.witness().unwrap().1.value, rat_int(1));
    }
}
