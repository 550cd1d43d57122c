//! Weierstrass curves `y^2 = x^3 + a2*x^2 + a4*x + a6` over an exact field,
//! in the two shapes used throughout: short (`a2 = 0`) and 2-isogeny form
//! (`a6 = 0`, 2-torsion point at the origin).

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{self, ExactError, Int, Rat};
use crate::field::Field;
use crate::poly::{rational_roots, Poly, PolyError, RatFn, XPoly};

/// Mazur: a rational torsion point has order at most 12.
pub const MAZUR_MAX_ORDER: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("singular curve (zero discriminant)")]
    Singular,
    #[error("point {0} is not on the curve")]
    NotOnCurve(String),
    #[error("operation needs a short Weierstrass model")]
    NotShort,
    #[error("point {0} is not a 2-torsion point")]
    NotTwoTorsion(String),
    #[error("point at infinity not allowed here")]
    Infinity,
    #[error("point {0} has order 2")]
    OrderTwo(String),
    #[error("the fiber at {0} is singular")]
    SingularFiber(String),
    #[error("a coefficient has a pole at {0}")]
    UndefinedFiber(String),
    #[error("torsion structure {0} violates Mazur's bound")]
    TorsionBound(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model<F> {
    /// `y^2 = x^3 + a*x + b`
    Short { a: F, b: F },
    /// `y^2 = x^3 + a*x^2 + b*x`
    IsogenyForm { a: F, b: F },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve<F> {
    model: Model<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Pt<F> {
    Infinity,
    Affine { x: F, y: F },
}

impl<F: Field> Pt<F> {
    pub fn new(x: F, y: F) -> Self {
        Pt::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Pt::Infinity)
    }

    pub fn x(&self) -> Option<&F> {
        match self {
            Pt::Affine { x, .. } => Some(x),
            Pt::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&F> {
        match self {
            Pt::Affine { y, .. } => Some(y),
            Pt::Infinity => None,
        }
    }

    pub fn render(&self, var: &str) -> String {
        match self {
            Pt::Infinity => "O".into(),
            Pt::Affine { x, y } => format!("({}, {})", x.show(var), y.show(var)),
        }
    }
}

impl Pt<RatFn> {
    /// Reduction at `t0` on a good fiber: a pole in `x` reduces to `O`.
    pub fn specialize(&self, t0: &Rat) -> Result<Pt<Rat>, CurveError> {
        match self {
            Pt::Infinity => Ok(Pt::Infinity),
            Pt::Affine { x, y } => match x.eval(t0) {
                Err(PolyError::Pole(_)) => Ok(Pt::Infinity),
                Err(e) => Err(e.into()),
                Ok(xv) => Ok(Pt::new(xv, y.eval(t0)?)),
            },
        }
    }

    /// Substitute `t -> u` in both coordinates.
    pub fn compose(&self, u: &RatFn) -> Result<Pt<RatFn>, CurveError> {
        Ok(match self {
            Pt::Infinity => Pt::Infinity,
            Pt::Affine { x, y } => Pt::new(x.compose(u)?, y.compose(u)?),
        })
    }
}

impl<F: Field> fmt::Display for Curve<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("t"))
    }
}

impl<F: Field> Curve<F> {
    pub fn short(a: F, b: F) -> Result<Self, CurveError> {
        Self::from_model(Model::Short { a, b })
    }

    pub fn isogeny_form(a: F, b: F) -> Result<Self, CurveError> {
        Self::from_model(Model::IsogenyForm { a, b })
    }

    pub fn from_model(model: Model<F>) -> Result<Self, CurveError> {
        let c = Curve { model };
        if c.discriminant().is_zero() {
            return Err(CurveError::Singular);
        }
        Ok(c)
    }

    pub fn model(&self) -> &Model<F> {
        &self.model
    }

    pub fn is_short(&self) -> bool {
        matches!(self.model, Model::Short { .. })
    }

    /// `(a2, a4, a6)`.
    pub fn coefficients(&self) -> (F, F, F) {
        match &self.model {
            Model::Short { a, b } => (F::zero(), a.clone(), b.clone()),
            Model::IsogenyForm { a, b } => (a.clone(), b.clone(), F::zero()),
        }
    }

    fn b_invariants(&self) -> (F, F, F, F) {
        let (a2, a4, a6) = self.coefficients();
        let b2 = a2.scale(4);
        let b4 = a4.scale(2);
        let b6 = a6.scale(4);
        let b8 = a2.times(&a6).scale(4).minus(&a4.square());
        (b2, b4, b6, b8)
    }

    /// Short: `-16(4A^3 + 27B^2)`. Isogeny form: `16 b^2 (a^2 - 4b)`.
    pub fn discriminant(&self) -> F {
        let (b2, b4, b6, b8) = self.b_invariants();
        let t1 = b2.square().times(&b8).negate();
        let t2 = b4.pow(3).scale(8);
        let t3 = b6.square().scale(27);
        let t4 = b2.times(&b4).times(&b6).scale(9);
        t1.minus(&t2).minus(&t3).plus(&t4)
    }

    /// The discriminant divided by 16, i.e. the discriminant of the cubic.
    pub fn disc_over_16(&self) -> F {
        self.discriminant()
            .times(&F::from_rat(&exact::rat(1, 16)))
    }

    /// `x^3 + a2*x^2 + a4*x + a6`.
    pub fn rhs(&self, x: &F) -> F {
        let (a2, a4, a6) = self.coefficients();
        x.plus(&a2).times(x).plus(&a4).times(x).plus(&a6)
    }

    /// The cubic `x^3 + a2*x^2 + a4*x + a6` as a polynomial in `x`.
    pub fn two_torsion_cubic(&self) -> XPoly<F> {
        let (a2, a4, a6) = self.coefficients();
        XPoly::new(vec![a6, a4, a2, F::one()])
    }

    pub fn contains(&self, p: &Pt<F>) -> bool {
        match p {
            Pt::Infinity => true,
            Pt::Affine { x, y } => y.square() == self.rhs(x),
        }
    }

    pub fn check(&self, p: &Pt<F>, var: &str) -> Result<(), CurveError> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(CurveError::NotOnCurve(p.render(var)))
        }
    }

    pub fn neg(&self, p: &Pt<F>) -> Pt<F> {
        match p {
            Pt::Infinity => Pt::Infinity,
            Pt::Affine { x, y } => Pt::new(x.clone(), y.negate()),
        }
    }

    /// Chord-and-tangent addition; inputs are assumed on the curve.
    pub fn add(&self, p: &Pt<F>, q: &Pt<F>) -> Pt<F> {
        let (x1, y1, x2, y2) = match (p, q) {
            (Pt::Infinity, _) => return q.clone(),
            (_, Pt::Infinity) => return p.clone(),
            (Pt::Affine { x: x1, y: y1 }, Pt::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let (a2, a4, _) = self.coefficients();
        let lambda = if x1 == x2 {
            if y1.plus(y2).is_zero() {
                return Pt::Infinity;
            }
            let num = x1.square().scale(3).plus(&a2.times(x1).scale(2)).plus(&a4);
            num.over(&y1.scale(2)).expect("nonzero y")
        } else {
            y2.minus(y1).over(&x2.minus(x1)).expect("distinct x")
        };
        let x3 = lambda.square().minus(&a2).minus(x1).minus(x2);
        let y3 = lambda.times(&x1.minus(&x3)).minus(y1);
        Pt::new(x3, y3)
    }

    pub fn double(&self, p: &Pt<F>) -> Pt<F> {
        self.add(p, p)
    }

    pub fn sub(&self, p: &Pt<F>, q: &Pt<F>) -> Pt<F> {
        self.add(p, &self.neg(q))
    }

    pub fn smul(&self, n: i64, p: &Pt<F>) -> Pt<F> {
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Pt::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.double(&base);
            }
        }
        acc
    }

    /// Quartic in `x` whose roots are the `x(R)` with `x(2R) = x(P)`:
    /// `x^4 - b4 x^2 - 2 b6 x - b8 - x_P (4x^3 + b2 x^2 + 2 b4 x + b6)`.
    pub fn two_division_poly(&self, p: &Pt<F>) -> Result<XPoly<F>, CurveError> {
        let xp = p.x().ok_or(CurveError::Infinity)?;
        let (b2, b4, b6, b8) = self.b_invariants();
        let quartic = XPoly::new(vec![
            b8.negate(),
            b6.scale(2).negate(),
            b4.negate(),
            F::zero(),
            F::one(),
        ]);
        let psi = XPoly::new(vec![b6, b4.scale(2), b2, F::from_i64(4)]);
        Ok(quartic.minus(&psi.scale(xp)))
    }

    /// Translate `x -> x + x2` so that the 2-torsion point `(x2, 0)` moves to
    /// the origin.
    pub fn shift_to_isogeny_form(&self, t: &Pt<F>) -> Result<(Curve<F>, Shift<F>), CurveError> {
        let Model::Short { a, .. } = &self.model else {
            return Err(CurveError::NotShort);
        };
        let x2 = match t {
            Pt::Affine { x, y } if y.is_zero() && self.contains(t) => x.clone(),
            _ => return Err(CurveError::NotTwoTorsion(t.render("t"))),
        };
        let shifted = Curve::isogeny_form(x2.scale(3), x2.square().scale(3).plus(a))?;
        Ok((shifted, Shift { x: x2 }))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> Result<G, CurveError>) -> Result<Curve<G>, CurveError> {
        let model = match &self.model {
            Model::Short { a, b } => Model::Short { a: f(a)?, b: f(b)? },
            Model::IsogenyForm { a, b } => Model::IsogenyForm { a: f(a)?, b: f(b)? },
        };
        Curve::from_model(model)
    }

    pub fn render(&self, var: &str) -> String {
        let (a2, a4, a6) = self.coefficients();
        let mut out = "y^2 = x^3".to_string();
        for (c, mono) in [(&a2, "x^2"), (&a4, "x"), (&a6, "")] {
            if c.is_zero() {
                continue;
            }
            let s = c.show(var);
            let (sign, body) = match s.strip_prefix('-') {
                Some(rest) if !is_sum(rest) => (" - ", rest.to_string()),
                _ if is_sum(&s) => (" + ", format!("({s})")),
                _ => (" + ", s.clone()),
            };
            out.push_str(sign);
            match (body.as_str(), mono) {
                (_, "") => out.push_str(&body),
                ("1", _) => out.push_str(mono),
                _ => out.push_str(&format!("{body}*{mono}")),
            }
        }
        out
    }
}

/// Whether a rendered expression has a top-level `+` or `-`.
fn is_sum(s: &str) -> bool {
    let mut depth = 0i32;
    s.chars().any(|c| {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        depth == 0 && c == ' '
    })
}

/// Change of variables `x_old = x_new + x` (`y` unchanged).
#[derive(Debug, Clone, PartialEq)]
pub struct Shift<F> {
    pub x: F,
}

impl<F: Field> Shift<F> {
    pub fn forward(&self, p: &Pt<F>) -> Pt<F> {
        match p {
            Pt::Infinity => Pt::Infinity,
            Pt::Affine { x, y } => Pt::new(x.minus(&self.x), y.clone()),
        }
    }

    pub fn back(&self, p: &Pt<F>) -> Pt<F> {
        match p {
            Pt::Infinity => Pt::Infinity,
            Pt::Affine { x, y } => Pt::new(x.plus(&self.x), y.clone()),
        }
    }
}

impl Curve<Rat> {
    /// All `R` in `E(Q)` with `2R = P`, each verified by doubling.
    pub fn halves(&self, p: &Pt<Rat>) -> Result<Vec<Pt<Rat>>, CurveError> {
        let mut out = Vec::new();
        if p.is_infinity() {
            out.push(Pt::Infinity);
            out.extend(self.two_torsion_points()?);
            return Ok(out);
        }
        let d = self.two_division_poly(p)?.to_poly();
        for x0 in rational_roots(&d)? {
            let Some(y0) = exact::sqrt_rat(&self.rhs(&x0)) else {
                continue;
            };
            let mut cands = vec![Pt::new(x0.clone(), y0.clone())];
            if !y0.is_zero() {
                cands.push(Pt::new(x0, -y0));
            }
            out.extend(cands.into_iter().filter(|r| self.double(r) == *p));
        }
        Ok(out)
    }

    /// Halving of an affine point of order other than 2.
    pub fn halve_q(&self, p: &Pt<Rat>) -> Result<Vec<Pt<Rat>>, CurveError> {
        match p {
            Pt::Infinity => Err(CurveError::Infinity),
            Pt::Affine { y, .. } if y.is_zero() => Err(CurveError::OrderTwo(p.render("t"))),
            _ => {
                self.check(p, "t")?;
                self.halves(p)
            }
        }
    }

    /// Points of exact order 2, by ascending `x`.
    pub fn two_torsion_points(&self) -> Result<Vec<Pt<Rat>>, CurveError> {
        let roots = rational_roots(&self.two_torsion_cubic().to_poly())?;
        Ok(roots.into_iter().map(|x| Pt::new(x, Rat::zero())).collect())
    }

    /// Integral model via `(x, y) -> (u^2 x, u^3 y)`; returns it with `u`.
    pub fn integral_model(&self) -> (Curve<Rat>, Int) {
        let (a2, a4, a6) = self.coefficients();
        let u = [&a2, &a4, &a6]
            .iter()
            .fold(Int::one(), |l, c| exact::lcm_int(&l, c.denom()));
        let uq = Rat::from_integer(u.clone());
        let model = match &self.model {
            Model::Short { a, b } => Model::Short {
                a: a * num_traits::pow(uq.clone(), 4),
                b: b * num_traits::pow(uq.clone(), 6),
            },
            Model::IsogenyForm { a, b } => Model::IsogenyForm {
                a: a * num_traits::pow(uq.clone(), 2),
                b: b * num_traits::pow(uq.clone(), 4),
            },
        };
        (Curve { model }, u)
    }

    /// Order of `p` if it is at most `MAZUR_MAX_ORDER`, else `None`.
    pub fn torsion_order(&self, p: &Pt<Rat>) -> Option<u32> {
        order_up_to(self, p, MAZUR_MAX_ORDER)
    }

    /// Full rational torsion subgroup by Nagell-Lutz on an integral model.
    pub fn torsion_q(&self) -> Result<TorsionGroup, CurveError> {
        let (model, u) = self.integral_model();
        let uq = Rat::from_integer(u);
        let back = |p: &Pt<Rat>| match p {
            Pt::Infinity => Pt::Infinity,
            Pt::Affine { x, y } => Pt::new(x / uq.pow(2), y / uq.pow(3)),
        };
        let disc = model.disc_over_16().to_integer();
        let mut points = vec![Pt::Infinity];
        points.extend(model.two_torsion_points()?.into_iter().filter(|p| {
            p.x().is_some_and(|x| x.is_integer())
        }));
        // y^2 | disc: y runs over divisors of the square root of the
        // largest square dividing disc
        let f = exact::factor_int(&disc.abs())?;
        let half: Int = f
            .factors
            .iter()
            .map(|(p, e)| num_traits::pow(p.clone(), (*e / 2) as usize))
            .product();
        let ys = exact::factor_int(&half)?.divisors();
        let cubic = model.two_torsion_cubic().to_poly();
        for y in ys {
            let yq = Rat::from_integer(y);
            let shifted = &cubic - &Poly::constant(yq.pow(2));
            for x in rational_roots(&shifted)? {
                if !x.is_integer() {
                    continue;
                }
                for p in [Pt::new(x.clone(), yq.clone()), Pt::new(x.clone(), -&yq)] {
                    if model.torsion_order(&p).is_some() {
                        points.push(p);
                    }
                }
            }
        }
        let orders: Vec<u32> = points
            .iter()
            .map(|p| model.torsion_order(p).expect("torsion"))
            .collect();
        let n = points.len() as u32;
        let two_count = orders.iter().filter(|&&o| o <= 2).count();
        let max_i = (0..points.len()).max_by_key(|&i| orders[i]).unwrap_or(0);
        let (invariants, gens) = if n == 1 {
            (Vec::new(), Vec::new())
        } else if two_count == 4 {
            // Z/2 x Z/2m: add a 2-torsion point outside <P>
            let p = &points[max_i];
            let multiples: Vec<Pt<Rat>> = (0..orders[max_i] as i64)
                .map(|k| model.smul(k, p))
                .collect();
            let t = points
                .iter()
                .zip(&orders)
                .find(|(q, &o)| o == 2 && !multiples.contains(q))
                .map(|(q, _)| q.clone())
                .expect("full 2-torsion");
            (vec![2, n / 2], vec![p.clone(), t])
        } else {
            (vec![n], vec![points[max_i].clone()])
        };
        let group = TorsionGroup {
            invariants,
            generators: gens.iter().map(back).collect(),
            points: points.iter().map(back).collect(),
        };
        if !group.satisfies_mazur() {
            return Err(CurveError::TorsionBound(group.describe()));
        }
        Ok(group)
    }
}

impl Curve<RatFn> {
    /// The fiber at `t0`; singular or undefined fibers are errors.
    pub fn specialize(&self, t0: &Rat) -> Result<Curve<Rat>, CurveError> {
        self.map(|c| Ok(c.eval(t0)?)).map_err(|e| match e {
            CurveError::Singular => CurveError::SingularFiber(exact::fmt_rat(t0)),
            CurveError::Poly(PolyError::Pole(_)) => CurveError::UndefinedFiber(exact::fmt_rat(t0)),
            e => e,
        })
    }

    /// Roots in Q(t) of the 2-torsion cubic.
    pub fn two_torsion_qt(&self) -> Result<Vec<RatFn>, CurveError> {
        Ok(self.two_torsion_cubic().roots()?)
    }

    /// All `R` in `E(Q(t))` with `2R = P`, each verified by doubling.
    pub fn halves_qt(&self, p: &Pt<RatFn>) -> Result<Vec<Pt<RatFn>>, CurveError> {
        let mut out = Vec::new();
        if p.is_infinity() {
            out.push(Pt::Infinity);
            for x in self.two_torsion_qt()? {
                out.push(Pt::new(x, RatFn::zero()));
            }
            return Ok(out);
        }
        for x0 in self.two_division_poly(p)?.roots()? {
            let Some(y0) = self.rhs(&x0).sqrt() else {
                continue;
            };
            let mut cands = vec![Pt::new(x0.clone(), y0.clone())];
            if !y0.is_zero() {
                cands.push(Pt::new(x0, -&y0));
            }
            out.extend(cands.into_iter().filter(|r| self.double(r) == *p));
        }
        Ok(out)
    }
}

/// Rational torsion subgroup.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionGroup {
    /// Orders of the cyclic factors; empty for the trivial group.
    pub invariants: Vec<u32>,
    pub generators: Vec<Pt<Rat>>,
    /// Every torsion point, `O` first.
    pub points: Vec<Pt<Rat>>,
}

impl TorsionGroup {
    pub fn order(&self) -> u32 {
        self.invariants.iter().product()
    }

    pub fn two_torsion(&self) -> Vec<Pt<Rat>> {
        self.points
            .iter()
            .filter(|p| p.y().is_some_and(|y| y.is_zero()))
            .cloned()
            .collect()
    }

    pub fn satisfies_mazur(&self) -> bool {
        match self.invariants.as_slice() {
            [] => true,
            [n] => (2..=10).contains(n) || *n == 12,
            [2, m] => m % 2 == 0 && (2..=8).contains(m),
            _ => false,
        }
    }

    pub fn describe(&self) -> String {
        if self.invariants.is_empty() {
            return "trivial".into();
        }
        self.invariants
            .iter()
            .map(|n| format!("Z/{n}"))
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

/// Smallest `n` in `1..=bound` with `nP = O`, over any field.
pub fn order_up_to<F: Field>(e: &Curve<F>, p: &Pt<F>, bound: u32) -> Option<u32> {
    let mut q = p.clone();
    for n in 1..=bound {
        if q.is_infinity() {
            return Some(n);
        }
        q = e.add(&q, p);
    }
    None
}
