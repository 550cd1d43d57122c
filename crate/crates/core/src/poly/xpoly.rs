//! Polynomials in a second variable `x` over an exact field. With
//! coefficients in Q(t) these are the bivariate polynomials of the crate
//! (2-torsion cubics, 2-division quartics, curve factors).

use num_traits::{One, Signed, Zero};

use super::factor::factor_z;
use super::{Poly, PolyError, RatFn};
use crate::exact::{self, Int, Rat};
use crate::field::Field;

#[derive(Clone, PartialEq, Debug)]
pub struct XPoly<F> {
    coeffs: Vec<F>,
}

/// Polynomial in `x` with coefficients in Q(t).
pub type BiPoly = XPoly<RatFn>;

impl<F: Field> XPoly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        XPoly { coeffs }
    }

    pub fn zero() -> Self {
        XPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        XPoly::new(vec![c])
    }

    pub fn x() -> Self {
        XPoly::new(vec![F::zero(), F::one()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.times(x).plus(c);
        }
        acc
    }

    pub fn plus(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        XPoly::new((0..n).map(|i| self.coeff(i).plus(&o.coeff(i))).collect())
    }

    pub fn minus(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        XPoly::new((0..n).map(|i| self.coeff(i).minus(&o.coeff(i))).collect())
    }

    pub fn negate(&self) -> Self {
        XPoly::new(self.coeffs.iter().map(|c| c.negate()).collect())
    }

    pub fn times(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return XPoly::zero();
        }
        let mut v = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].plus(&a.times(b));
            }
        }
        XPoly::new(v)
    }

    pub fn scale(&self, k: &F) -> Self {
        XPoly::new(self.coeffs.iter().map(|c| c.times(k)).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = XPoly::constant(F::one());
        for _ in 0..e {
            acc = acc.times(self);
        }
        acc
    }

    /// Division with remainder; `None` for a zero divisor.
    pub fn divrem(&self, d: &Self) -> Option<(Self, Self)> {
        let dd = d.degree()?;
        let inv = d.lc().inverse()?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Some((XPoly::zero(), self.clone()));
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            let c = r[k].times(&inv);
            let shift = k - dd;
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[i + shift] = r[i + shift].minus(&c.times(dc));
            }
            q[shift] = c;
        }
        r.truncate(dd);
        Some((XPoly::new(q), XPoly::new(r)))
    }

    pub fn divides(&self, other: &Self) -> bool {
        other
            .divrem(self)
            .is_some_and(|(_, r)| r.is_zero())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> XPoly<G> {
        XPoly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn try_map<G: Field, E>(&self, f: impl Fn(&F) -> Result<G, E>) -> Result<XPoly<G>, E> {
        Ok(XPoly::new(
            self.coeffs.iter().map(f).collect::<Result<_, _>>()?,
        ))
    }
}

impl XPoly<Rat> {
    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    pub fn from_poly(p: &Poly) -> Self {
        XPoly::new(p.coeffs().to_vec())
    }
}

impl XPoly<RatFn> {
    /// Compose every coefficient with `u`.
    pub fn substitute(&self, u: &RatFn) -> Result<XPoly<RatFn>, PolyError> {
        self.try_map(|c| c.compose(u))
    }

    /// Multiply by the least common denominator so every coefficient is a
    /// polynomial. Returns the cleared polynomial and the multiplier.
    pub fn clear_denominators(&self) -> (XPoly<RatFn>, Poly) {
        let mut l = Poly::one();
        for c in &self.coeffs {
            l = l.lcm(c.den());
        }
        let lf = RatFn::from_poly(l.clone());
        (self.scale(&lf), l)
    }

    pub fn specialize(&self, t0: &Rat) -> Result<XPoly<Rat>, PolyError> {
        self.try_map(|c| c.eval(t0))
    }

    /// `x` occurs only with constant (in `t`) coefficients? Used by the
    /// parser to detect division by something involving `x`.
    pub fn as_coefficient(&self) -> Option<&RatFn> {
        match self.coeffs.len() {
            0 => None,
            1 => Some(&self.coeffs[0]),
            _ => None,
        }
    }

    pub fn render(&self, param: &str, xvar: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => xvar.to_string(),
                _ => format!("{xvar}^{k}"),
            };
            let cs = c.render(param);
            let term = if mono.is_empty() {
                format!("({cs})")
            } else if c.as_constant().is_some_and(|q| q.is_one()) {
                mono
            } else {
                format!("({cs})*{mono}")
            };
            parts.push(term);
        }
        parts.join(" + ")
    }

    /// All roots in Q(t) of this polynomial in `x`. The monic polynomial is
    /// rescaled by `x = X/mu` to have coefficients in Z[t]; integral roots
    /// then divide the constant term and are found by enumerating divisor
    /// candidates, each confirmed by exact substitution.
    pub fn roots(&self) -> Result<Vec<RatFn>, PolyError> {
        let Some(n) = self.degree() else {
            return Err(PolyError::ZeroInput);
        };
        if n == 0 {
            return Ok(Vec::new());
        }
        let inv = self.lc().recip()?;
        let f = self.scale(&inv);
        if f.coeff(0).is_zero() {
            let deflated = XPoly::new(f.coeffs[1..].to_vec());
            let mut out = deflated.roots()?;
            out.push(RatFn::zero());
            sort_ratfns(&mut out);
            return Ok(out);
        }
        let mut den = Poly::one();
        for c in &f.coeffs {
            den = den.lcm(c.den());
        }
        let den_f = RatFn::from_poly(den.clone());
        let mut scaled: Vec<Poly> = Vec::with_capacity(n + 1);
        for (k, c) in f.coeffs.iter().enumerate() {
            let s = c * &den_f.pow((n - k) as u32);
            scaled.push(s.as_poly().expect("denominator cleared").clone());
        }
        let mut int_l = Int::one();
        for p in &scaled {
            for c in p.coeffs() {
                int_l = exact::lcm_int(&int_l, c.denom());
            }
        }
        let l = Rat::from_integer(int_l.clone());
        let g: Vec<Poly> = scaled
            .iter()
            .enumerate()
            .map(|(k, p)| p.scale(&num_traits::pow(l.clone(), n - k)))
            .collect();
        let mu = den.scale(&l);

        // deg X <= max over k<n of ceil(deg g_k / (n - k))
        let bound = (0..n)
            .filter(|&k| !g[k].is_zero())
            .map(|k| g[k].deg().div_ceil(n - k))
            .max()
            .unwrap_or(0);

        let fac = factor_z(&g[0])?;
        let content: Int = fac
            .content
            .iter()
            .map(|(p, e)| num_traits::pow(p.clone(), *e as usize))
            .product();
        let divisors = exact::factor_int(&content)?.divisors();

        let probe = exact::rat(7, 3);
        let probe_vals: Option<Vec<Rat>> = g.iter().map(|p| Some(p.eval(&probe))).collect();
        let probe_vals = probe_vals.unwrap();

        let mut roots: Vec<RatFn> = Vec::new();
        let mut exps = vec![0u32; fac.factors.len()];
        loop {
            let deg: usize = exps
                .iter()
                .zip(&fac.factors)
                .map(|(e, (p, _))| *e as usize * p.deg())
                .sum();
            if deg <= bound {
                let base = exps
                    .iter()
                    .zip(&fac.factors)
                    .fold(Poly::one(), |acc, (e, (p, _))| &acc * &p.pow(*e));
                for d in &divisors {
                    for sign in [1i64, -1] {
                        let cand = base.scale(&Rat::from_integer(d * Int::from(sign)));
                        let cv = cand.eval(&probe);
                        let mut acc = Rat::zero();
                        for pv in probe_vals.iter().rev() {
                            acc = acc * &cv + pv;
                        }
                        if !acc.is_zero() {
                            continue;
                        }
                        let mut exact_acc = Poly::zero();
                        for p in g.iter().rev() {
                            exact_acc = &(&exact_acc * &cand) + p;
                        }
                        if exact_acc.is_zero() {
                            roots.push(RatFn::new(cand, mu.clone())?);
                        }
                    }
                }
            }
            // odometer over exponent vectors
            let mut i = 0;
            loop {
                if i == exps.len() {
                    sort_ratfns(&mut roots);
                    roots.dedup();
                    return Ok(roots);
                }
                if exps[i] < fac.factors[i].1 {
                    exps[i] += 1;
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }
}

fn sort_ratfns(v: &mut [RatFn]) {
    v.sort_by(|a, b| {
        a.den()
            .canonical_cmp(b.den())
            .then_with(|| a.num().canonical_cmp(b.num()))
    });
}

/// Sign-aware comparison helper for tests and listings.
pub fn ratfn_is_negative_constant(f: &RatFn) -> bool {
    f.as_constant().is_some_and(|c| c.is_negative())
}
