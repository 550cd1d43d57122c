//! Job dispatch: parse the sections a route needs, run the library
//! pipeline once per requested value, and wrap the results as
//! certificates in input order.

use std::time::Instant;

use rayon::prelude::*;
use speccert_core::descent::build_base_2descent;
use speccert_core::ellcurve::{Curve, Pt};
use speccert_core::exact::{fmt_rat, Rat};
use speccert_core::extend::{
    self, over_fiber, prepare_prop5, prepare_prop7, prop5_at, prop7_at, BaseMode, Evidence,
    HalvingPoint, InjectivityCertificate, Parametrization, Prop7Input, Route, Target,
};
use speccert_core::par::Exec;
use speccert_core::poly::{factor_z, parse_bipoly, parse_constant, parse_expr, parse_point, BiPoly, RatFn};

use crate::cert::{Bundle, Certificate};
use crate::error::CliError;
use crate::job::{Job, Source, Text};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub exec: Exec,
    pub timing: bool,
}

/// 0 when nothing is `Indeterminate`, else 2.
pub fn exit_code(bundle: &Bundle) -> i32 {
    if bundle.certificates.iter().any(Certificate::is_indeterminate) {
        EXIT_INDETERMINATE
    } else {
        EXIT_OK
    }
}

struct Ctx<'a, S> {
    job: &'a Job<S>,
    src: &'a Source,
}

/// The parameter is `t` for `Q(t)` and `alpha` for `Q(alpha)`.
fn curve_var(field: &str) -> Result<&'static str, CliError> {
    match field {
        "Q(t)" => Ok("t"),
        "Q(alpha)" => Ok("alpha"),
        other => Err(CliError::new("E-FIELD", format!("unknown field '{other}'"))),
    }
}

impl<S: Text> Ctx<'_, S> {
    fn expr(&self, s: &S, key: &str, var: &str) -> Result<RatFn, CliError> {
        parse_expr(s.text(), var).map_err(|e| self.parse_error(s, key, e.column, e.kind))
    }

    fn constant(&self, s: &S, key: &str) -> Result<Rat, CliError> {
        parse_constant(s.text()).map_err(|e| self.parse_error(s, key, e.column, e.kind))
    }

    fn bipoly(&self, s: &S, key: &str, offset: usize, text: &str) -> Result<BiPoly, CliError> {
        parse_bipoly(text, "t", "a").map_err(|e| self.parse_error(s, key, e.column + offset, e.kind))
    }

    fn parse_error(&self, s: &S, key: &str, column: usize, kind: impl std::fmt::Display) -> CliError {
        CliError::new("E-PARSE", format!("{}: {kind}", self.src.locate(s, key, column)))
    }

    fn curve(&self) -> Result<(Curve<RatFn>, &'static str), CliError> {
        let c = self
            .job
            .curve
            .as_ref()
            .ok_or_else(|| missing("[curve]"))?;
        let var = curve_var(&c.field)?;
        let a = self.expr(&c.a, "curve.a", var)?;
        let b = self.expr(&c.b, "curve.b", var)?;
        let curve = match c.model.as_str() {
            "short" => Curve::short(a, b)?,
            "isogeny" => Curve::isogeny_form(a, b)?,
            other => return Err(CliError::new("E-MODEL", format!("unknown model '{other}'"))),
        };
        Ok((curve, var))
    }

    fn point(&self, e: &Curve<RatFn>, name: &str, var: &str) -> Result<Pt<RatFn>, CliError> {
        let s = self
            .job
            .points
            .get(name)
            .ok_or_else(|| CliError::new("E-NAME", format!("no point named '{name}' in [points]")))?;
        let key = format!("points.{name}");
        let p = match parse_point(s.text(), var)
            .map_err(|e| self.parse_error(s, &key, e.column, e.kind))?
        {
            None => Pt::Infinity,
            Some((x, y)) => Pt::new(x, y),
        };
        e.check(&p, var)?;
        Ok(p)
    }

    fn generators(&self, e: &Curve<RatFn>, var: &str, skip: Option<&str>) -> Result<Vec<(String, Pt<RatFn>)>, CliError> {
        let Some(g) = &self.job.generators else {
            return Ok(Vec::new());
        };
        if !g.independent {
            return Err(CliError::new(
                "E-ASSUMPTION",
                "[generators] must set independent = true; independence is asserted, not proved",
            ));
        }
        g.names
            .iter()
            .filter(|n| Some(n.as_str()) != skip)
            .map(|n| Ok((n.clone(), self.point(e, n, var)?)))
            .collect()
    }

    fn parametrization(&self) -> Result<Parametrization, CliError> {
        let p = self
            .job
            .parametrization
            .as_ref()
            .ok_or_else(|| missing("[parametrization]"))?;
        let u = self.expr(&p.u, "parametrization.u", "alpha")?;
        let v = self.expr(&p.v, "parametrization.v", "alpha")?;
        let target = if p.target.text().trim() == "two-torsion" {
            Target::TwoTorsion
        } else {
            Target::Factor(self.bipoly(&p.target, "parametrization.target", 0, p.target.text())?)
        };
        Ok(Parametrization { u, v, target })
    }

    fn halving_point(&self) -> Result<HalvingPoint, CliError> {
        let s = self
            .job
            .parametrization
            .as_ref()
            .and_then(|p| p.halving_point.as_ref())
            .ok_or_else(|| missing("parametrization.halving_point"))?;
        let key = "parametrization.halving_point";
        let (xo, x, yo, y) = split_pair(s.text())
            .ok_or_else(|| self.parse_error(s, key, 1, "expected '(x, y)'"))?;
        Ok(HalvingPoint::OnDivisionCurve {
            x: self.bipoly(s, key, xo, x)?,
            y: self.bipoly(s, key, yo, y)?,
        })
    }

    fn base_mode(&self) -> Result<BaseMode, CliError> {
        match self.job.job.base.as_deref() {
            None | Some("discriminant") => Ok(BaseMode::Discriminant),
            Some("isogeny") => Ok(BaseMode::Isogeny),
            Some(other) => Err(CliError::new("E-JOB", format!("unknown base '{other}'"))),
        }
    }

    fn values(&self, list: &[S], key: &str) -> Result<Vec<Rat>, CliError> {
        list.iter()
            .enumerate()
            .map(|(i, s)| self.constant(s, &format!("{key}[{i}]")))
            .collect()
    }
}

fn missing(what: &str) -> CliError {
    CliError::new("E-MISSING", format!("this route needs {what}"))
}

/// Split `"(x, y)"` at its top-level comma; returns each part with the
/// byte offset of its first character.
fn split_pair(text: &str) -> Option<(usize, &str, usize, &str)> {
    let open = text.find('(')?;
    let close = text.rfind(')')?;
    if close <= open || !text[..open].trim().is_empty() || !text[close + 1..].trim().is_empty() {
        return None;
    }
    let mut depth = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 1 => {
                return Some((open + 1, &text[open + 1..i], i + 1, &text[i + 1..close]));
            }
            _ => {}
        }
    }
    None
}

/// What a single certificate answers.
#[derive(Clone, Copy)]
enum At<'a> {
    T0(&'a Rat, usize),
    Alpha0(&'a Rat, usize),
}

/// The job restricted to one requested value.
fn echo<S: Text>(job: &Job<S>, at: At) -> Job<String> {
    let mut j = job.plain();
    match at {
        At::T0(_, i) => {
            j.job.t0 = vec![j.job.t0[i].clone()];
            j.job.alpha0.clear();
        }
        At::Alpha0(_, i) => {
            j.job.alpha0 = vec![j.job.alpha0[i].clone()];
            j.job.t0.clear();
        }
    }
    j
}

fn requests<'a>(t0: &'a [Rat], alpha0: &'a [Rat]) -> Vec<At<'a>> {
    let mut v: Vec<At> = t0.iter().enumerate().map(|(i, r)| At::T0(r, i)).collect();
    v.extend(alpha0.iter().enumerate().map(|(i, r)| At::Alpha0(r, i)));
    v
}

/// Run each request, concurrently, keeping input order.
fn each<F>(reqs: &[At], opts: Options, f: F) -> Result<Vec<Certificate>, CliError>
where
    F: Fn(At) -> Result<Certificate, CliError> + Sync,
{
    let work = |at: &At| {
        let start = Instant::now();
        let mut c = f(*at)?;
        if opts.timing {
            c.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        Ok(c)
    };
    if opts.exec.is_parallel() {
        reqs.par_iter().map(work).collect()
    } else {
        reqs.iter().map(work).collect()
    }
}

fn no_values(route: &str) -> CliError {
    CliError::new("E-JOB", format!("route {route} needs at least one value in job.t0 or job.alpha0"))
}

fn only_t0(route: &str, alpha0: &[Rat]) -> Result<(), CliError> {
    if alpha0.is_empty() {
        Ok(())
    } else {
        Err(CliError::new("E-JOB", format!("route {route} takes job.t0, not job.alpha0")))
    }
}

pub fn run_job<S: Text + Sync>(job: &Job<S>, src: &Source, opts: Options) -> Result<Bundle, CliError> {
    let cx = Ctx { job, src };
    let t0s = cx.values(&job.job.t0, "job.t0")?;
    let alphas = cx.values(&job.job.alpha0, "job.alpha0")?;
    let reqs = requests(&t0s, &alphas);
    let route = job.job.route.as_str();
    let exec = opts.exec;
    let certs = match route {
        "factor" => {
            let s = job.job.poly.as_ref().ok_or_else(|| missing("job.poly"))?;
            let var = match &job.curve {
                Some(c) => curve_var(&c.field)?,
                None => "t",
            };
            let f = cx.expr(s, "job.poly", var)?;
            let poly = f.as_poly().ok_or_else(|| CliError::new("E-JOB", "job.poly must be a polynomial"))?;
            let fz = factor_z(poly)?;
            let mut ev = vec![Evidence::new("unit", vec![], fz.unit.to_string())];
            for (p, e) in &fz.content {
                ev.push(Evidence::new("content-prime", vec![p.to_string()], e.to_string()));
            }
            for (g, m) in &fz.factors {
                ev.push(Evidence::new("factor", vec![g.render(var)], m.to_string()));
            }
            ev.push(Evidence::new("product", vec![], fz.product().render(var)));
            vec![Certificate::informational(job.plain(), route, None, ev)]
        }
        "specialize" => {
            let (e, var) = cx.curve()?;
            only_t0(route, &alphas)?;
            if reqs.is_empty() {
                return Err(no_values(route));
            }
            let points: Vec<(String, Pt<RatFn>)> = job
                .points
                .keys()
                .map(|n| Ok((n.clone(), cx.point(&e, n, var)?)))
                .collect::<Result<_, CliError>>()?;
            each(&reqs, opts, |at| {
                let At::T0(t0, _) = at else { unreachable!() };
                let f = e.specialize(t0)?;
                let mut ev = vec![
                    Evidence::new("curve", vec![], e.render(var)),
                    Evidence::new("fiber", vec![fmt_rat(t0)], f.render(var)),
                    Evidence::new("discriminant", vec![fmt_rat(t0)], fmt_rat(&f.discriminant())),
                ];
                for (n, p) in &points {
                    let q = p.specialize(t0)?;
                    ev.push(Evidence::new("point", vec![n.clone(), fmt_rat(t0)], q.render(var)));
                }
                ev.push(Evidence::new("torsion", vec![fmt_rat(t0)], f.torsion_q()?.describe()));
                Ok(Certificate::informational(echo(job, at), route, Some(fmt_rat(t0)), ev))
            })?
        }
        "descent2" | "isogeny2" | "prop2check" => {
            let (e, var) = cx.curve()?;
            only_t0(route, &alphas)?;
            if reqs.is_empty() {
                return Err(no_values(route));
            }
            let mode = cx.base_mode()?;
            let gens = if route == "prop2check" {
                let g = cx.generators(&e, var, None)?;
                if g.is_empty() {
                    return Err(missing("[generators] with at least one name"));
                }
                g
            } else {
                Vec::new()
            };
            if route == "descent2" {
                // surface base errors once rather than per value
                let roots = e.two_torsion_qt()?;
                if roots.len() == 3 {
                    if let (Some(a), Some(b), Some(c)) = (roots[0].as_poly(), roots[1].as_poly(), roots[2].as_poly()) {
                        build_base_2descent(a, b, c)?;
                    }
                }
            }
            each(&reqs, opts, |at| {
                let At::T0(t0, _) = at else { unreachable!() };
                let c = match route {
                    "descent2" => extend::pipeline_descent2(&e, t0, var, exec)?,
                    "isogeny2" => extend::pipeline_isogeny2(&e, t0, mode, var, exec)?,
                    _ => extend::pipeline_prop2(&e, &gens, t0, var, exec)?,
                };
                Ok(Certificate::from_core(echo(job, at), &c))
            })?
        }
        "prop5" => {
            let (e, var) = cx.curve()?;
            require_t(var)?;
            if reqs.is_empty() {
                return Err(no_values(route));
            }
            let p = cx.parametrization()?;
            let mode = cx.base_mode()?;
            let setup = prepare_prop5(&e, &p)?;
            each(&reqs, opts, |at| {
                let c = at_value(Route::Prop5, &p.u, at, |a| prop5_at(&setup, a, mode, exec))?;
                Ok(Certificate::from_core(echo(job, at), &c))
            })?
        }
        "prop7" => {
            let (e, var) = cx.curve()?;
            require_t(var)?;
            if reqs.is_empty() {
                return Err(no_values(route));
            }
            let param = cx.parametrization()?;
            let pname = job
                .parametrization
                .as_ref()
                .and_then(|p| p.point.clone())
                .unwrap_or_else(|| "P".into());
            let input = Prop7Input {
                point: (pname.clone(), cx.point(&e, &pname, var)?),
                extra_gens: cx.generators(&e, var, Some(&pname))?,
                halving: cx.halving_point()?,
                param,
                curve: e,
            };
            let setup = prepare_prop7(&input)?;
            each(&reqs, opts, |at| {
                let c = at_value(Route::Prop7, &input.param.u, at, |a| prop7_at(&input, &setup, a, exec))?;
                Ok(Certificate::from_core(echo(job, at), &c))
            })?
        }
        other => return Err(CliError::new("E-ROUTE", format!("unknown route '{other}'"))),
    };
    Ok(Bundle::new(certs))
}

fn require_t(var: &str) -> Result<(), CliError> {
    if var == "t" {
        Ok(())
    } else {
        Err(CliError::new("E-FIELD", "parametrized routes need a curve over Q(t)"))
    }
}

fn at_value(
    route: Route,
    u: &RatFn,
    at: At,
    f: impl FnMut(&Rat) -> Result<InjectivityCertificate, extend::ExtendError>,
) -> Result<InjectivityCertificate, CliError> {
    let mut f = f;
    Ok(match at {
        At::Alpha0(a, _) => f(a)?,
        At::T0(t0, _) => over_fiber(route, u, t0, f)?,
    })
}

/// Re-run every certificate from its echoed inputs and compare.
pub fn replay(bundle: &Bundle, opts: Options) -> Result<Vec<String>, CliError> {
    let mut lines = Vec::new();
    for (i, c) in bundle.certificates.iter().enumerate() {
        let hash = crate::cert::hash_inputs(&c.inputs);
        if hash != c.input_hash {
            return Err(CliError::new(
                "E-REPLAY",
                format!("certificate {i}: input hash {} does not match inputs ({hash})", c.input_hash),
            ));
        }
        let again = run_job(&c.inputs, &Source::detached("certificate inputs"), Options { timing: false, ..opts })?;
        let mut stored = c.clone();
        stored.timing_ms = None;
        if again.certificates != vec![stored] {
            return Err(CliError::new(
                "E-REPLAY",
                format!("certificate {i}: recomputation differs from the stored evidence"),
            ));
        }
        let at = c
            .t0
            .as_ref()
            .map(|t| format!(" t0={t}"))
            .unwrap_or_default();
        lines.push(format!("replay ok: certificate {i} ({}{at}): {}", c.route, c.verdict));
    }
    Ok(lines)
}
