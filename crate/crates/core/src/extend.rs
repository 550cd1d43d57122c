//! Transfer of a curve over Q(t) to a curve over Q(alpha) through a rational
//! parametrization of its 2-torsion curve or of a 2-division curve of a
//! point, and the end-to-end injectivity pipelines built on it.
//!
//! Every pipeline returns an [`InjectivityCertificate`] whose evidence lists
//! the exact identities and square tests behind the verdict. Verdicts are
//! `Injective` or `Indeterminate`; non-injectivity is never claimed.

use num_traits::Zero;
use thiserror::Error;

use crate::descent::{
    self, CriterionReport, DescentError, FactorBase, Outcome, SqClass,
};
use crate::ellcurve::{Curve, CurveError, Model, Pt};
use crate::exact::{fmt_rat, Rat};
use crate::par::Exec;
use crate::poly::{factor_z, rational_roots, BiPoly, Poly, PolyError, RatFn, XPoly};

/// Generator lists larger than this are refused (2^n subset sums).
pub const MAX_GENERATORS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtendError {
    #[error("parametrization does not satisfy the target equation")]
    BadParametrization,
    #[error("parametrization u is constant")]
    ConstantParametrization,
    #[error("the curve already has a Q(t)-rational 2-torsion point {0}; use a descent route")]
    HasTwoTorsion(String),
    #[error("the curve does not have full Q(t)-rational 2-torsion")]
    NotFullTwoTorsion,
    #[error("the curve has no Q(t)-rational 2-torsion point")]
    NoTwoTorsion,
    #[error("coefficient {0} is not a polynomial")]
    NotPolynomial(String),
    #[error("special point {0} is not on the transferred model")]
    SpecialPointOffCurve(String),
    #[error("2R' != P': doubling the halving point gives {0}")]
    HalvingMismatch(String),
    #[error("factor does not divide the 2-division polynomial of P")]
    FactorDoesNotDivide,
    #[error("P = {0} is 2-torsion")]
    TwoTorsionPoint(String),
    #[error("P is divisible by 2 over Q(t): {0} doubles to it")]
    PointDivisible(String),
    #[error("alpha0 = {0} is a pole of u")]
    PoleOfU(String),
    #[error("subset sum of {0} is O over Q(t); generators are dependent")]
    DependentGenerators(String),
    #[error("generator {0} has order 2")]
    TorsionGenerator(String),
    #[error("no generators supplied")]
    NoGenerators,
    #[error("{0} generators exceed the limit of {MAX_GENERATORS}")]
    TooManyGenerators(usize),
    #[error("specialization does not commute with {0}")]
    CommutationFailure(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Descent(#[from] DescentError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl From<crate::exact::ExactError> for ExtendError {
    fn from(e: crate::exact::ExactError) -> Self {
        ExtendError::Poly(e.into())
    }
}

/// What the parametrization parametrizes.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// The 2-torsion cubic `x^3 + a2 x^2 + a4 x + a6` of the curve.
    TwoTorsion,
    /// A factor of the 2-division polynomial of a point, in `t` and `a`.
    Factor(BiPoly),
}

/// `t -> u(alpha)`, `a -> v(alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Parametrization {
    pub u: RatFn,
    pub v: RatFn,
    pub target: Target,
}

impl Parametrization {
    /// The target equation as a polynomial in `a` over Q(t).
    pub fn target_poly(&self, e: &Curve<RatFn>) -> BiPoly {
        match &self.target {
            Target::TwoTorsion => e.two_torsion_cubic(),
            Target::Factor(f) => f.clone(),
        }
    }
}

/// Checks the substitution identity `target(u, v) = 0` and that `u` is
/// nonconstant. Birationality is not certified.
pub fn verify_parametrization(e: &Curve<RatFn>, p: &Parametrization) -> Result<bool, ExtendError> {
    if p.u.is_constant() {
        return Ok(false);
    }
    let target = p.target_poly(e);
    if target.is_zero() {
        return Ok(false);
    }
    Ok(target.substitute(&p.u)?.eval(&p.v).is_zero())
}

/// A curve over Q(t) moved to Q(alpha) by `t -> u`, and its model with
/// polynomial coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferredModel {
    pub u: RatFn,
    /// Coefficients composed with `u`.
    pub transferred: Curve<RatFn>,
    /// Monic `delta` with `(x, y) -> (delta^2 x, delta^3 y)` clearing all
    /// denominators of `transferred`.
    pub scale: Poly,
    pub cleared: Curve<RatFn>,
}

impl TransferredModel {
    /// `P(u(alpha))` on the transferred model.
    pub fn embed_point(&self, p: &Pt<RatFn>) -> Result<Pt<RatFn>, ExtendError> {
        Ok(p.compose(&self.u)?)
    }

    /// Move a point of the transferred model onto the cleared model.
    pub fn to_cleared(&self, p: &Pt<RatFn>) -> Pt<RatFn> {
        let d = RatFn::from_poly(self.scale.clone());
        match p {
            Pt::Infinity => Pt::Infinity,
            Pt::Affine { x, y } => Pt::new(x * &d.pow(2), y * &d.pow(3)),
        }
    }
}

/// Least monic `delta` such that `delta^(2i) * c_i` is a polynomial for the
/// coefficient `c_i` of `x^(3-i)`.
fn clearing_scale(e: &Curve<RatFn>) -> Result<Poly, ExtendError> {
    let (a2, a4, a6) = e.coefficients();
    let mut need: Vec<(Poly, u32)> = Vec::new();
    for (c, weight) in [(a2, 2u32), (a4, 4), (a6, 6)] {
        if c.den().is_constant() {
            continue;
        }
        for (f, mult) in factor_z(c.den())?.factors {
            let k = mult.div_ceil(weight);
            let f = f.monic();
            match need.iter_mut().find(|(g, _)| *g == f) {
                Some(entry) => entry.1 = entry.1.max(k),
                None => need.push((f, k)),
            }
        }
    }
    Ok(need.iter().fold(Poly::one(), |acc, (f, k)| &acc * &f.pow(*k)))
}

/// Compose the coefficients with `u` and clear denominators.
pub fn transfer_model(e: &Curve<RatFn>, u: &RatFn) -> Result<TransferredModel, ExtendError> {
    if u.is_constant() {
        return Err(ExtendError::ConstantParametrization);
    }
    let transferred = e.map(|c| Ok(c.compose(u)?))?;
    let scale = clearing_scale(&transferred)?;
    let d = RatFn::from_poly(scale.clone());
    let cleared = match transferred.model() {
        Model::Short { a, b } => Curve::short(a * &d.pow(4), b * &d.pow(6))?,
        Model::IsogenyForm { a, b } => Curve::isogeny_form(a * &d.pow(2), b * &d.pow(4))?,
    };
    Ok(TransferredModel {
        u: u.clone(),
        transferred,
        scale,
        cleared,
    })
}

/// All rational `alpha0` with `u(alpha0) = t0`, ascending.
pub fn solve_fiber(u: &RatFn, t0: &Rat) -> Result<Vec<Rat>, ExtendError> {
    let p = u.num() - &u.den().scale(t0);
    if p.is_zero() {
        return Err(ExtendError::ConstantParametrization);
    }
    Ok(rational_roots(&p)?)
}

/// The fiber of `e` at `t0`.
pub fn specialize(e: &Curve<RatFn>, t0: &Rat) -> Result<Curve<Rat>, ExtendError> {
    Ok(e.specialize(t0)?)
}

/// Reduction of a point at `t0`.
pub fn specialize_pt(p: &Pt<RatFn>, t0: &Rat) -> Result<Pt<Rat>, ExtendError> {
    Ok(p.specialize(t0)?)
}

/// One line of a certificate: what was checked, on what, with what result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    pub kind: String,
    pub operands: Vec<String>,
    pub result: String,
}

impl Evidence {
    pub fn new(kind: &str, operands: Vec<String>, result: impl Into<String>) -> Self {
        Evidence {
            kind: kind.into(),
            operands,
            result: result.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Injective,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Injective => "Injective",
            Verdict::Indeterminate => "Indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Descent2,
    Isogeny2,
    Prop5,
    Prop7,
    Prop2Check,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Descent2 => "descent2",
            Route::Isogeny2 => "isogeny2",
            Route::Prop5 => "prop5",
            Route::Prop7 => "prop7",
            Route::Prop2Check => "prop2check",
        }
    }
}

/// Why a verdict is not `Injective`.
#[derive(Debug, Clone, PartialEq)]
pub enum Obstruction {
    /// A subset product of a factor base is a square at the point.
    SquareProduct {
        side: String,
        factors: Vec<String>,
        value: Rat,
    },
    /// A base generator vanishes at the point.
    Vanishing { generator: String },
    /// A subset sum of generators specializes to a double.
    Halving {
        generators: Vec<String>,
        point: Pt<Rat>,
        half: Pt<Rat>,
    },
    /// A subset sum of generators specializes to `O`.
    Kernel { generators: Vec<String> },
    /// The fiber has rational 2-torsion not coming from Q(t).
    FiberTwoTorsion { point: Pt<Rat> },
    /// No rational `alpha0` maps to the requested `t0`.
    Unreachable,
}

impl Obstruction {
    pub fn describe(&self) -> String {
        match self {
            Obstruction::SquareProduct { side, factors, value } => {
                let wrapped: Vec<String> = factors
                    .iter()
                    .map(|f| if f.contains(' ') { format!("({f})") } else { f.clone() })
                    .collect();
                format!("{side} product {} is the square {}", wrapped.join("*"), fmt_rat(value))
            }
            Obstruction::Vanishing { generator } => {
                format!("generator {generator} vanishes")
            }
            Obstruction::Halving {
                generators,
                point,
                half,
            } => format!(
                "sum of {} specializes to {} = [2]{}",
                generators.join("+"),
                point.render("t"),
                half.render("t")
            ),
            Obstruction::Kernel { generators } => {
                format!("sum of {} specializes to O", generators.join("+"))
            }
            Obstruction::FiberTwoTorsion { point } => {
                format!("fiber has rational 2-torsion point {}", point.render("t"))
            }
            Obstruction::Unreachable => "no rational alpha0 with u(alpha0) = t0".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityCertificate {
    pub route: Route,
    pub t0: Option<Rat>,
    pub alpha0: Option<Rat>,
    pub verdict: Verdict,
    pub obstruction: Option<Obstruction>,
    pub evidence: Vec<Evidence>,
    pub assumptions: Vec<String>,
}

pub const ASSUME_BIRATIONAL: &str = "parametrization birationality assumed; substitution identity verified";
pub const ASSUME_INDEPENDENT: &str = "generator independence asserted";
pub const AUTOMATIC_CONDITIONS: &str =
    "finite generation (function-field Mordell-Weil) and injectivity on torsion (formal groups) hold automatically";

fn render_points(names: &[String], sum: SqClass) -> Vec<String> {
    sum.indices().into_iter().map(|i| names[i].clone()).collect()
}

/// One nonempty subset sum of the generators and its fiber behavior.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSum {
    pub class: SqClass,
    pub generators: Vec<String>,
    pub specialized: Pt<Rat>,
    pub halves: Vec<Pt<Rat>>,
}

/// Record of the per-fiber injectivity conditions for a subgroup with
/// given generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop2Transcript {
    pub at: Rat,
    pub fiber: Curve<Rat>,
    pub sums: Vec<SubsetSum>,
    /// Mod-2 injectivity: no subset sum specializes into `2 E(Q)`.
    pub mod2_injective: bool,
    pub generic_two_torsion: Vec<RatFn>,
    pub fiber_two_torsion: Vec<Pt<Rat>>,
    /// The subgroup is torsion-free, so this needs trivial fiber 2-torsion.
    pub two_torsion_matches: bool,
}

impl Prop2Transcript {
    pub fn holds(&self) -> bool {
        self.mod2_injective && self.two_torsion_matches
    }

    pub fn obstruction(&self) -> Option<Obstruction> {
        if let Some(s) = self.sums.iter().find(|s| s.specialized.is_infinity()) {
            return Some(Obstruction::Kernel {
                generators: s.generators.clone(),
            });
        }
        if let Some(s) = self.sums.iter().find(|s| !s.halves.is_empty()) {
            return Some(Obstruction::Halving {
                generators: s.generators.clone(),
                point: s.specialized.clone(),
                half: s.halves[0].clone(),
            });
        }
        self.fiber_two_torsion
            .first()
            .map(|p| Obstruction::FiberTwoTorsion { point: p.clone() })
    }

    pub fn evidence(&self, var: &str) -> Vec<Evidence> {
        let at = fmt_rat(&self.at);
        let mut ev = vec![Evidence::new(
            "fiber",
            vec![at.clone()],
            self.fiber.render(var),
        )];
        for s in &self.sums {
            let result = if s.specialized.is_infinity() {
                "O".to_string()
            } else if s.halves.is_empty() {
                "not divisible by 2".to_string()
            } else {
                format!("= [2]{}", s.halves[0].render(var))
            };
            ev.push(Evidence::new(
                "subset-sum",
                vec![s.generators.join("+"), s.specialized.render(var)],
                result,
            ));
        }
        ev.push(Evidence::new(
            "generic-two-torsion",
            vec![],
            render_list(self.generic_two_torsion.iter().map(|r| r.render(var))),
        ));
        ev.push(Evidence::new(
            "fiber-two-torsion",
            vec![at],
            render_list(self.fiber_two_torsion.iter().map(|p| p.render(var))),
        ));
        ev.push(Evidence::new(
            "condition",
            vec!["mod-2 injectivity".into()],
            pass(self.mod2_injective),
        ));
        ev.push(Evidence::new(
            "condition",
            vec!["2-torsion isomorphism".into()],
            pass(self.two_torsion_matches),
        ));
        ev
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

fn render_list(items: impl Iterator<Item = String>) -> String {
    format!("[{}]", items.collect::<Vec<_>>().join(", "))
}

/// Check mod-2 injectivity and the 2-torsion condition at `t0` for the
/// subgroup generated by `gens` (asserted independent).
pub fn check_prop2_conditions(
    e: &Curve<RatFn>,
    gens: &[(String, Pt<RatFn>)],
    t0: &Rat,
    exec: Exec,
) -> Result<Prop2Transcript, ExtendError> {
    if gens.is_empty() {
        return Err(ExtendError::NoGenerators);
    }
    if gens.len() > MAX_GENERATORS {
        return Err(ExtendError::TooManyGenerators(gens.len()));
    }
    for (name, p) in gens {
        e.check(p, "t")?;
        if p.is_infinity() {
            return Err(ExtendError::DependentGenerators(name.clone()));
        }
        if p.y().is_some_and(|y| y.is_zero()) {
            return Err(ExtendError::TorsionGenerator(name.clone()));
        }
    }
    let fiber = e.specialize(t0)?;
    let names: Vec<String> = gens.iter().map(|(n, _)| n.clone()).collect();
    let n = gens.len();
    let total = 1usize << n;

    // sums over Q(t), built from the sum without the highest generator
    let mut generic: Vec<Pt<RatFn>> = vec![Pt::Infinity; total];
    for mask in 1..total {
        let high = (usize::BITS - 1 - mask.leading_zeros()) as usize;
        generic[mask] = e.add(&generic[mask ^ (1 << high)], &gens[high].1);
        if generic[mask].is_infinity() {
            let class = SqClass(mask as u64);
            return Err(ExtendError::DependentGenerators(
                render_points(&names, class).join("+"),
            ));
        }
    }
    // the same sums formed on the fiber must agree
    let special: Vec<Pt<Rat>> = gens
        .iter()
        .map(|(_, p)| p.specialize(t0))
        .collect::<Result<_, _>>()?;
    let masks: Vec<usize> = (1..total).collect();
    let results = exec.map(&masks, |&mask| -> Result<SubsetSum, ExtendError> {
        let class = SqClass(mask as u64);
        let specialized = generic[mask].specialize(t0)?;
        let fiber_sum = class
            .indices()
            .into_iter()
            .fold(Pt::Infinity, |acc, i| fiber.add(&acc, &special[i]));
        if fiber_sum != specialized {
            return Err(ExtendError::CommutationFailure(
                render_points(&names, class).join("+"),
            ));
        }
        let halves = if specialized.is_infinity() {
            Vec::new()
        } else {
            fiber.halves(&specialized)?
        };
        Ok(SubsetSum {
            class,
            generators: render_points(&names, class),
            specialized,
            halves,
        })
    });
    let sums: Vec<SubsetSum> = results.into_iter().collect::<Result<_, _>>()?;
    let mod2_injective = sums
        .iter()
        .all(|s| !s.specialized.is_infinity() && s.halves.is_empty());
    let generic_two_torsion = e.two_torsion_qt()?;
    let fiber_two_torsion = fiber.two_torsion_points()?;
    // the subgroup is free, so its 2-torsion is trivial
    let two_torsion_matches = fiber_two_torsion.is_empty();
    Ok(Prop2Transcript {
        at: t0.clone(),
        fiber,
        sums,
        mod2_injective,
        generic_two_torsion,
        fiber_two_torsion,
        two_torsion_matches,
    })
}

/// Which factor base the isogeny criterion is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaseMode {
    /// One base from the factors of the discriminant over 16; it generates
    /// both isogeny bases, so every subset product of it being nonsquare
    /// implies the criterion.
    #[default]
    Discriminant,
    /// The two bases from `b` and `a^2 - 4b` separately.
    Isogeny,
}

fn polynomial(c: &RatFn, var: &str) -> Result<Poly, ExtendError> {
    c.as_poly()
        .cloned()
        .ok_or_else(|| ExtendError::NotPolynomial(c.render(var)))
}

fn base_evidence(label: &str, base: &FactorBase, var: &str) -> Evidence {
    Evidence::new(
        "factor-base",
        vec![label.to_string()],
        render_list(base.render(var).into_iter()),
    )
}

fn criterion_evidence(report: &CriterionReport, var: &str) -> Vec<Evidence> {
    let mut ev = Vec::new();
    for side in &report.sides {
        let names = side.base.render(var);
        for (name, v) in names.iter().zip(&side.values) {
            ev.push(Evidence::new(
                "generator-value",
                vec![side.label.clone(), name.clone(), fmt_rat(&report.at)],
                fmt_rat(v),
            ));
        }
        for (i, v) in side.products.iter().enumerate() {
            let class = SqClass(i as u64 + 1);
            let factors: Vec<String> = class.indices().into_iter().map(|k| names[k].clone()).collect();
            let square = crate::exact::is_square(v);
            ev.push(Evidence::new(
                "subset-product",
                vec![side.label.clone(), factors.join("*"), fmt_rat(v)],
                if square { "square" } else { "nonsquare" },
            ));
        }
        ev.push(Evidence::new(
            "products-checked",
            vec![side.label.clone()],
            side.products_checked().to_string(),
        ));
    }
    ev
}

/// Run a criterion check and turn it into a verdict, obstruction and
/// evidence; a vanishing generator is `Indeterminate`.
fn judge(
    check: impl FnOnce() -> Result<CriterionReport, DescentError>,
    var: &str,
) -> Result<(Verdict, Option<Obstruction>, Vec<Evidence>), ExtendError> {
    match check() {
        Ok(report) => {
            let ev = criterion_evidence(&report, var);
            match report.outcome {
                Outcome::Holds => Ok((Verdict::Injective, None, ev)),
                Outcome::Fails => {
                    let (side, w) = report.witness().expect("failing report has a witness");
                    let names = side.base.render(var);
                    let ob = Obstruction::SquareProduct {
                        side: side.label.clone(),
                        factors: w.class.indices().into_iter().map(|i| names[i].clone()).collect(),
                        value: w.value.clone(),
                    };
                    Ok((Verdict::Indeterminate, Some(ob), ev))
                }
            }
        }
        Err(DescentError::Vanishes { generator, at }) => {
            let ev = vec![Evidence::new("generator-value", vec![generator.clone(), at], "0")];
            Ok((Verdict::Indeterminate, Some(Obstruction::Vanishing { generator }), ev))
        }
        Err(e) => Err(e.into()),
    }
}

/// Criterion for a curve with full Q(t)-rational 2-torsion.
pub fn pipeline_descent2(
    e: &Curve<RatFn>,
    t0: &Rat,
    var: &str,
    exec: Exec,
) -> Result<InjectivityCertificate, ExtendError> {
    let roots = e.two_torsion_qt()?;
    if roots.len() != 3 {
        return Err(ExtendError::NotFullTwoTorsion);
    }
    let rs: Vec<Poly> = roots.iter().map(|r| polynomial(r, var)).collect::<Result<_, _>>()?;
    let base = descent::build_base_2descent(&rs[0], &rs[1], &rs[2])?;
    let mut evidence = vec![
        Evidence::new("curve", vec![], e.render(var)),
        Evidence::new(
            "two-torsion-roots",
            vec![],
            render_list(rs.iter().map(|r| r.render(var))),
        ),
        base_evidence("descent", &base, var),
    ];
    let (verdict, obstruction, ev) = judge(|| descent::check_criterion_2descent(&base, t0, exec), var)?;
    evidence.extend(ev);
    Ok(InjectivityCertificate {
        route: Route::Descent2,
        t0: Some(t0.clone()),
        alpha0: None,
        verdict,
        obstruction,
        evidence,
        assumptions: vec![],
    })
}

/// The isogeny-form coefficients `(a, b)` of `e`, shifting a rational
/// 2-torsion point to the origin if the model is short.
fn isogeny_coefficients(e: &Curve<RatFn>, var: &str) -> Result<(Poly, Poly, Vec<Evidence>), ExtendError> {
    let mut ev = Vec::new();
    let shifted = match e.model() {
        Model::IsogenyForm { .. } => e.clone(),
        Model::Short { .. } => {
            let roots = e.two_torsion_qt()?;
            let root = roots.first().ok_or(ExtendError::NoTwoTorsion)?;
            let t = Pt::new(root.clone(), RatFn::zero());
            let (s, _) = e.shift_to_isogeny_form(&t)?;
            ev.push(Evidence::new(
                "shift",
                vec![t.render(var)],
                s.render(var),
            ));
            s
        }
    };
    let (a, b, _) = shifted.coefficients();
    Ok((polynomial(&a, var)?, polynomial(&b, var)?, ev))
}

fn isogeny_check(
    e: &Curve<RatFn>,
    at: &Rat,
    mode: BaseMode,
    var: &str,
    exec: Exec,
) -> Result<(Verdict, Option<Obstruction>, Vec<Evidence>), ExtendError> {
    let (a, b, mut evidence) = isogeny_coefficients(e, var)?;
    let (verdict, obstruction, ev) = match mode {
        BaseMode::Discriminant => {
            let base = descent::base_from_discriminant(e)?;
            evidence.push(Evidence::new("disc/16", vec![], e.disc_over_16().render(var)));
            evidence.push(base_evidence("discriminant", &base, var));
            judge(|| descent::check_criterion_2descent(&base, at, exec).map(|mut r| {
                r.sides[0].label = "discriminant".into();
                r
            }), var)?
        }
        BaseMode::Isogeny => {
            let (phi, dual) = descent::build_base_2isogeny(&a, &b)?;
            evidence.push(base_evidence("isogeny", &phi, var));
            evidence.push(base_evidence("dual-isogeny", &dual, var));
            judge(|| descent::check_criterion_2isogeny(&phi, &dual, at, exec), var)?
        }
    };
    evidence.extend(ev);
    Ok((verdict, obstruction, evidence))
}

/// Criterion for a curve with a Q(t)-rational 2-torsion point.
pub fn pipeline_isogeny2(
    e: &Curve<RatFn>,
    t0: &Rat,
    mode: BaseMode,
    var: &str,
    exec: Exec,
) -> Result<InjectivityCertificate, ExtendError> {
    let mut evidence = vec![Evidence::new("curve", vec![], e.render(var))];
    let (verdict, obstruction, ev) = isogeny_check(e, t0, mode, var, exec)?;
    evidence.extend(ev);
    Ok(InjectivityCertificate {
        route: Route::Isogeny2,
        t0: Some(t0.clone()),
        alpha0: None,
        verdict,
        obstruction,
        evidence,
        assumptions: vec![],
    })
}

fn fiber_of(u: &RatFn, alpha0: &Rat) -> Result<Rat, ExtendError> {
    u.eval(alpha0).map_err(|e| match e {
        PolyError::Pole(_) => ExtendError::PoleOfU(fmt_rat(alpha0)),
        e => e.into(),
    })
}

/// Prepared data for the 2-torsion-curve route, independent of `alpha0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop5Setup {
    pub model: TransferredModel,
    /// The 2-torsion point `(delta^2 v, 0)` on the cleared model.
    pub two_torsion: Pt<RatFn>,
    pub evidence: Vec<Evidence>,
}

pub fn prepare_prop5(e: &Curve<RatFn>, p: &Parametrization) -> Result<Prop5Setup, ExtendError> {
    if p.target != Target::TwoTorsion {
        return Err(ExtendError::BadParametrization);
    }
    if let Some(r) = e.two_torsion_qt()?.first() {
        return Err(ExtendError::HasTwoTorsion(r.render("t")));
    }
    if !verify_parametrization(e, p)? {
        return Err(ExtendError::BadParametrization);
    }
    let model = transfer_model(e, &p.u)?;
    let t = model.to_cleared(&Pt::new(p.v.clone(), RatFn::zero()));
    if !model.cleared.contains(&t) {
        return Err(ExtendError::SpecialPointOffCurve(t.render("alpha")));
    }
    let var = "alpha";
    let evidence = vec![
        Evidence::new("curve", vec![], e.render("t")),
        Evidence::new(
            "parametrization-identity",
            vec![p.u.render(var), p.v.render(var)],
            "x^3 + A(u)x + B(u) vanishes at x = v",
        ),
        Evidence::new("transferred-model", vec![p.u.render(var)], model.transferred.render(var)),
        Evidence::new("clearing-scale", vec![], model.scale.render(var)),
        Evidence::new("cleared-model", vec![], model.cleared.render(var)),
        Evidence::new("two-torsion-point", vec![], t.render(var)),
        Evidence::new("discriminant", vec![], model.cleared.discriminant().render(var)),
    ];
    Ok(Prop5Setup {
        model,
        two_torsion: t,
        evidence,
    })
}

/// Injectivity at `t0 = u(alpha0)` through the transferred model, which
/// has a rational 2-torsion point.
pub fn pipeline_prop5(
    e: &Curve<RatFn>,
    p: &Parametrization,
    alpha0: &Rat,
    mode: BaseMode,
    exec: Exec,
) -> Result<InjectivityCertificate, ExtendError> {
    let setup = prepare_prop5(e, p)?;
    prop5_at(&setup, alpha0, mode, exec)
}

pub fn prop5_at(
    setup: &Prop5Setup,
    alpha0: &Rat,
    mode: BaseMode,
    exec: Exec,
) -> Result<InjectivityCertificate, ExtendError> {
    let var = "alpha";
    let t0 = fiber_of(&setup.model.u, alpha0)?;
    let mut evidence = setup.evidence.clone();
    evidence.push(Evidence::new("fiber-parameter", vec![fmt_rat(alpha0)], fmt_rat(&t0)));
    let cleared = &setup.model.cleared;
    let (verdict, obstruction, ev) = if cleared.two_torsion_qt()?.len() == 3 {
        // cyclic cubic: full 2-torsion after the transfer
        let c = Curve::clone(cleared);
        let cert = pipeline_descent2(&c, alpha0, var, exec)?;
        (cert.verdict, cert.obstruction, cert.evidence)
    } else {
        let (s, _) = cleared.shift_to_isogeny_form(&setup.two_torsion)?;
        evidence.push(Evidence::new(
            "shift",
            vec![setup.two_torsion.render(var)],
            s.render(var),
        ));
        isogeny_check(&s, alpha0, mode, var, exec)?
    };
    evidence.extend(ev);
    Ok(InjectivityCertificate {
        route: Route::Prop5,
        t0: Some(t0),
        alpha0: Some(alpha0.clone()),
        verdict,
        obstruction,
        evidence,
        assumptions: vec![ASSUME_BIRATIONAL.into()],
    })
}

/// Inputs of the 2-division-curve route.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop7Input {
    pub curve: Curve<RatFn>,
    /// Name and coordinates of the point being halved.
    pub point: (String, Pt<RatFn>),
    pub param: Parametrization,
    /// Halving point as a polynomial in `a` over Q(t) for each coordinate.
    pub halving: HalvingPoint,
    /// Further generators of the subgroup, over Q(t).
    pub extra_gens: Vec<(String, Pt<RatFn>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HalvingPoint {
    /// Coordinates in `t` and `a`, mapped through `t -> u`, `a -> v`.
    OnDivisionCurve { x: BiPoly, y: BiPoly },
    /// Coordinates already in `alpha`.
    Direct(Pt<RatFn>),
}

/// Prepared data for the 2-division-curve route, independent of `alpha0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop7Setup {
    pub model: TransferredModel,
    pub halving: Pt<RatFn>,
    /// Named generators of the subgroup on the transferred model: the
    /// halving point first, then the embedded extra generators.
    pub gens: Vec<(String, Pt<RatFn>)>,
    pub embedded: Vec<(String, Pt<RatFn>)>,
    pub evidence: Vec<Evidence>,
}

/// `R'` from its description and the parametrization.
pub fn build_halving_point(h: &HalvingPoint, p: &Parametrization) -> Result<Pt<RatFn>, ExtendError> {
    match h {
        HalvingPoint::Direct(r) => Ok(r.clone()),
        HalvingPoint::OnDivisionCurve { x, y } => {
            let x = x.substitute(&p.u)?.eval(&p.v);
            let y = y.substitute(&p.u)?.eval(&p.v);
            Ok(Pt::new(x, y))
        }
    }
}

pub fn prepare_prop7(input: &Prop7Input) -> Result<Prop7Setup, ExtendError> {
    let e = &input.curve;
    let (pname, p) = &input.point;
    let var = "alpha";
    e.check(p, "t")?;
    if p.is_infinity() {
        return Err(CurveError::Infinity.into());
    }
    if p.y().is_some_and(|y| y.is_zero()) {
        return Err(ExtendError::TwoTorsionPoint(p.render("t")));
    }
    let Target::Factor(phi) = &input.param.target else {
        return Err(ExtendError::BadParametrization);
    };
    let d = e.two_division_poly(p)?;
    if !phi.divides(&d) {
        return Err(ExtendError::FactorDoesNotDivide);
    }
    if let Some(r) = e.halves_qt(p)?.first() {
        return Err(ExtendError::PointDivisible(r.render("t")));
    }
    if !verify_parametrization(e, &input.param)? {
        return Err(ExtendError::BadParametrization);
    }
    let model = transfer_model(e, &input.param.u)?;
    let ep = &model.transferred;
    let p_emb = model.embed_point(p)?;
    let r = build_halving_point(&input.halving, &input.param)?;
    if !ep.contains(&r) {
        return Err(ExtendError::SpecialPointOffCurve(r.render(var)));
    }
    let doubled = ep.double(&r);
    if doubled != p_emb {
        return Err(ExtendError::HalvingMismatch(doubled.render(var)));
    }
    let mut evidence = vec![
        Evidence::new("curve", vec![], e.render("t")),
        Evidence::new("point", vec![pname.clone()], p.render("t")),
        Evidence::new("two-division-polynomial", vec![pname.clone()], d.render("t", "x")),
        Evidence::new("division-factor", vec![], phi.render("t", "a")),
        Evidence::new("divisible-over-Q(t)", vec![pname.clone()], "no: the 2-division polynomial has no Q(t)-root giving a half"),
        Evidence::new(
            "parametrization-identity",
            vec![input.param.u.render(var), input.param.v.render(var)],
            "factor vanishes at (u, v)",
        ),
        Evidence::new("transferred-model", vec![input.param.u.render(var)], ep.render(var)),
        Evidence::new("clearing-scale", vec![], model.scale.render(var)),
        Evidence::new("cleared-model", vec![], model.cleared.render(var)),
        Evidence::new("embedded-point", vec![pname.clone()], p_emb.render(var)),
        Evidence::new("halving-point", vec![], r.render(var)),
        Evidence::new("doubling", vec![r.render(var)], p_emb.render(var)),
    ];
    let mut embedded = vec![(pname.clone(), p_emb)];
    let mut gens = vec![(format!("{pname}/2"), r.clone())];
    for (name, q) in &input.extra_gens {
        e.check(q, "t")?;
        let q_emb = model.embed_point(q)?;
        evidence.push(Evidence::new("embedded-point", vec![name.clone()], q_emb.render(var)));
        embedded.push((name.clone(), q_emb.clone()));
        gens.push((name.clone(), q_emb));
    }
    Ok(Prop7Setup {
        model,
        halving: r,
        gens,
        embedded,
        evidence,
    })
}

/// Injectivity at `t0 = u(alpha0)` on the subgroup generated by the
/// halving point and the extra generators.
pub fn pipeline_prop7(input: &Prop7Input, alpha0: &Rat, exec: Exec) -> Result<InjectivityCertificate, ExtendError> {
    let setup = prepare_prop7(input)?;
    prop7_at(input, &setup, alpha0, exec)
}

pub fn prop7_at(
    input: &Prop7Input,
    setup: &Prop7Setup,
    alpha0: &Rat,
    exec: Exec,
) -> Result<InjectivityCertificate, ExtendError> {
    let var = "alpha";
    let t0 = fiber_of(&setup.model.u, alpha0)?;
    let mut evidence = setup.evidence.clone();
    evidence.push(Evidence::new("fiber-parameter", vec![fmt_rat(alpha0)], fmt_rat(&t0)));
    // the transferred fiber at alpha0 is the original fiber at t0
    let base_fiber = input.curve.specialize(&t0)?;
    let fiber = setup.model.transferred.specialize(alpha0)?;
    if base_fiber != fiber {
        return Err(ExtendError::CommutationFailure("fiber".into()));
    }
    for ((name, emb), orig) in setup
        .embedded
        .iter()
        .zip(std::iter::once(&input.point).chain(&input.extra_gens))
    {
        let a = emb.specialize(alpha0)?;
        let b = orig.1.specialize(&t0)?;
        if a != b {
            return Err(ExtendError::CommutationFailure(name.clone()));
        }
        evidence.push(Evidence::new(
            "commutation",
            vec![name.clone(), fmt_rat(alpha0), fmt_rat(&t0)],
            a.render(var),
        ));
    }
    let transcript = check_prop2_conditions(&setup.model.transferred, &setup.gens, alpha0, exec)?;
    evidence.extend(transcript.evidence(var));
    let verdict = if transcript.holds() {
        Verdict::Injective
    } else {
        Verdict::Indeterminate
    };
    Ok(InjectivityCertificate {
        route: Route::Prop7,
        t0: Some(t0),
        alpha0: Some(alpha0.clone()),
        verdict,
        obstruction: transcript.obstruction(),
        evidence,
        assumptions: vec![
            ASSUME_BIRATIONAL.into(),
            ASSUME_INDEPENDENT.into(),
            AUTOMATIC_CONDITIONS.into(),
        ],
    })
}

/// Per-fiber conditions for a subgroup of `E(Q(t))` given by generators.
pub fn pipeline_prop2(
    e: &Curve<RatFn>,
    gens: &[(String, Pt<RatFn>)],
    t0: &Rat,
    var: &str,
    exec: Exec,
) -> Result<InjectivityCertificate, ExtendError> {
    let mut evidence = vec![Evidence::new("curve", vec![], e.render(var))];
    for (name, p) in gens {
        evidence.push(Evidence::new("generator", vec![name.clone()], p.render(var)));
    }
    let transcript = check_prop2_conditions(e, gens, t0, exec)?;
    evidence.extend(transcript.evidence(var));
    let verdict = if transcript.holds() {
        Verdict::Injective
    } else {
        Verdict::Indeterminate
    };
    Ok(InjectivityCertificate {
        route: Route::Prop2Check,
        t0: Some(t0.clone()),
        alpha0: None,
        verdict,
        obstruction: transcript.obstruction(),
        evidence,
        assumptions: vec![ASSUME_INDEPENDENT.into(), AUTOMATIC_CONDITIONS.into()],
    })
}

/// For a `t0` request on a parametrized route: try each rational `alpha0`
/// over `t0` in ascending order and keep the first `Injective`
/// certificate, else the last one computed.
pub fn over_fiber(
    route: Route,
    u: &RatFn,
    t0: &Rat,
    mut at: impl FnMut(&Rat) -> Result<InjectivityCertificate, ExtendError>,
) -> Result<InjectivityCertificate, ExtendError> {
    let alphas = solve_fiber(u, t0)?;
    let solved = Evidence::new(
        "solve-fiber",
        vec![u.render("alpha"), fmt_rat(t0)],
        render_list(alphas.iter().map(fmt_rat)),
    );
    let mut last = None;
    for a in &alphas {
        let mut cert = at(a)?;
        cert.evidence.insert(0, solved.clone());
        if cert.verdict == Verdict::Injective {
            return Ok(cert);
        }
        last = Some(cert);
    }
    Ok(last.unwrap_or_else(|| InjectivityCertificate {
        route,
        t0: Some(t0.clone()),
        alpha0: None,
        verdict: Verdict::Indeterminate,
        obstruction: Some(Obstruction::Unreachable),
        evidence: vec![solved],
        assumptions: vec![],
    }))
}

/// Polynomial in `a` with coefficients in Q(t): convenience for callers
/// assembling division-curve factors.
pub fn bipoly_from(coeffs: Vec<RatFn>) -> BiPoly {
    XPoly::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};
    use crate::field::Field;
    use num_traits::One;
    use crate::poly::{parse_bipoly, parse_expr};

    fn t(s: &str) -> RatFn {
        parse_expr(s, "t").unwrap()
    }

    fn al(s: &str) -> RatFn {
        parse_expr(s, "alpha").unwrap()
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

    #[test]
    fn parametrizations_verify() {
        let e = running();
        assert!(verify_parametrization(&e, &two_torsion_param()).unwrap());
        let mut bad = two_torsion_param();
        bad.v = &bad.v + &RatFn::one();
        assert!(!verify_parametrization(&e, &bad).unwrap());
    }

    #[test]
    fn cleared_model_matches() {
        let m = transfer_model(&running(), &two_torsion_param().u).unwrap();
        let d = al("alpha - alpha^3");
        assert_eq!(
            m.cleared,
            Curve::short(d.pow(2).negate(), d.pow(4)).unwrap()
        );
        assert_eq!(m.scale, al("alpha^3 - alpha").as_poly().unwrap().clone());
        let id = transfer_model(&running(), &RatFn::var()).unwrap();
        assert_eq!(id.cleared, running());
        assert!(id.scale.is_one());
    }

    #[test]
    fn fibers() {
        let u = two_torsion_param().u;
        assert!(solve_fiber(&u, &rat(8, 15)).unwrap().contains(&rat(-3, 2)));
        assert!(solve_fiber(&u, &rat(1, 6)).unwrap().contains(&rat_int(-2)));
        let u7 = al("4*alpha^3*(alpha+2)/(alpha^2+2*alpha-1)^2");
        assert!(solve_fiber(&u7, &rat_int(27)).unwrap().contains(&rat_int(-3)));
    }

    #[test]
    fn prop5_outcomes() {
        let e = running();
        let p = two_torsion_param();
        let c = pipeline_prop5(&e, &p, &rat(-3, 2), BaseMode::Discriminant, Exec::Sequential).unwrap();
        assert_eq!(c.verdict, Verdict::Injective);
        assert_eq!(c.t0, Some(rat(8, 15)));
        let c = pipeline_prop5(&e, &p, &rat_int(-2), BaseMode::Discriminant, Exec::Parallel).unwrap();
        assert_eq!(c.verdict, Verdict::Indeterminate);
        match c.obstruction {
            Some(Obstruction::SquareProduct { value, .. }) => assert_eq!(value, rat_int(1)),
            other => panic!("unexpected {other:?}"),
        }
        let c = pipeline_prop5(&e, &p, &rat(-3, 2), BaseMode::Isogeny, Exec::Sequential).unwrap();
        assert_eq!(c.verdict, Verdict::Injective);
    }

    fn prop7_input() -> Prop7Input {
        let u = al("4*alpha^3*(alpha+2)/(alpha^2+2*alpha-1)^2");
        let v = al("4*alpha^2*(alpha+2)/(alpha^2+2*alpha-1)^2");
        let phi = parse_bipoly(
            "a^4+2*t^2*a^2-8*t^2*a+t^4-t*(4*a^3-4*t^2*a+4*t^2)",
            "t",
            "a",
        )
        .unwrap();
        Prop7Input {
            curve: running(),
            point: ("P".into(), Pt::new(t("t"), t("t"))),
            param: Parametrization {
                u,
                v,
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
    fn prop7_outcomes() {
        let input = prop7_input();
        let setup = prepare_prop7(&input).unwrap();
        assert_eq!(
            setup.halving,
            Pt::new(
                al("4*alpha^2*(alpha+2)/(alpha^2+2*alpha-1)^2"),
                al("4*alpha^3*(alpha+2)*(alpha^2-3)/(alpha^2+2*alpha-1)^3")
            )
        );
        assert_eq!(setup.halving.specialize(&rat_int(-3)).unwrap(), Pt::new(rat_int(-9), rat_int(81)));
        let c = prop7_at(&input, &setup, &rat_int(-3), Exec::Parallel).unwrap();
        assert_eq!(c.verdict, Verdict::Injective);
        assert_eq!(c.t0, Some(rat_int(27)));
        let c = prop7_at(&input, &setup, &rat_int(-1), Exec::Sequential).unwrap();
        assert_eq!(c.verdict, Verdict::Indeterminate);
        match c.obstruction {
            Some(Obstruction::Halving { half, point, .. }) => {
                assert_eq!(half, Pt::new(rat_int(1), rat_int(1)));
                assert_eq!(point, Pt::new(rat_int(-1), rat_int(1)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fiber_two_torsion() {
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
        let tr = check_prop2_conditions(&e, &gens, &rat_int(30), Exec::Parallel).unwrap();
        assert_eq!(tr.sums.len(), 15);
        assert!(tr.mod2_injective);
        assert!(!tr.two_torsion_matches);
        assert_eq!(tr.fiber_two_torsion, vec![Pt::new(rat_int(15), rat_int(0))]);
    }
}
