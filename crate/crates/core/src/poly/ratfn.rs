//! Elements of Q(t): reduced quotients with monic denominator.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{owned_ops, Poly, PolyError};
use crate::exact::{fmt_rat, Rat};
use crate::field::Field;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl std::fmt::Debug for RatFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RatFn({})", self.render("t"))
    }
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        Ok(Self::normalized(num, den))
    }

    /// Assumes `gcd(num, den) = 1`.
    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFn {
                num,
                den: Poly::one(),
            };
        }
        let lc = den.lc();
        if lc.is_one() {
            RatFn { num, den }
        } else {
            let inv = lc.recip();
            RatFn {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFn {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(q: Rat) -> Self {
        Self::from_poly(Poly::constant(q))
    }

    pub fn var() -> Self {
        Self::from_poly(Poly::var())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_poly().then_some(&self.num)
    }

    pub fn as_constant(&self) -> Option<Rat> {
        (self.is_poly() && self.num.is_constant()).then(|| self.num.constant_term())
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn degree(&self) -> usize {
        self.num.deg().max(self.den.deg())
    }

    pub fn eval(&self, q: &Rat) -> Result<Rat, PolyError> {
        let d = self.den.eval(q);
        if d.is_zero() {
            return Err(PolyError::Pole(fmt_rat(q)));
        }
        Ok(self.num.eval(q) / d)
    }

    pub fn recip(&self) -> Result<RatFn, PolyError> {
        if self.num.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &RatFn) -> Result<RatFn, PolyError> {
        Ok(self * &o.recip()?)
    }

    pub fn pow(&self, e: u32) -> RatFn {
        RatFn {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// `self(g)`, canonicalized.
    pub fn compose(&self, g: &RatFn) -> Result<RatFn, PolyError> {
        let (n_deg, d_deg) = (self.num.deg(), self.den.deg());
        let hn = homogenized(&self.num, g.num(), g.den(), n_deg);
        let hd = homogenized(&self.den, g.num(), g.den(), d_deg);
        // self(g) = hn / q^n_deg  /  (hd / q^d_deg)
        let (num, den) = if d_deg >= n_deg {
            (&hn * &g.den.pow((d_deg - n_deg) as u32), hd)
        } else {
            (hn, &hd * &g.den.pow((n_deg - d_deg) as u32))
        };
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        RatFn::new(num, den)
    }

    /// Square root in Q(t), if one exists.
    pub fn sqrt(&self) -> Option<RatFn> {
        let n = super::factor::sqrt_poly(&self.num)?;
        let d = super::factor::sqrt_poly(&self.den)?;
        RatFn::new(n, d).ok()
    }

    /// `num/den` with integer coefficients throughout, e.g.
    /// `(4*t^3)/(t^2 + 2*t - 1)`.
    pub fn render(&self, var: &str) -> String {
        if self.den.is_one() {
            return self.num.render(var);
        }
        let (cn, zn) = self.num.to_primitive();
        let (cd, zd) = self.den.to_primitive();
        let r = cn / cd;
        let num = Poly::from_zpoly(&zn).scale(&Rat::from_integer(r.numer().clone()));
        let den = Poly::from_zpoly(&zd).scale(&Rat::from_integer(r.denom().clone()));
        let terms = |p: &Poly| p.coeffs().iter().filter(|c| !c.is_zero()).count();
        let n = num.render(var);
        let n = if terms(&num) > 1 { format!("({n})") } else { n };
        let d = den.render(var);
        let atom = d.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        let d = if atom { d } else { format!("({d})") };
        format!("{n}/{d}")
    }
}

fn homogenized(f: &Poly, p: &Poly, q: &Poly, deg: usize) -> Poly {
    // sum f_i p^i q^(deg - i), Horner style
    let mut acc = Poly::zero();
    let mut qpow = Poly::one();
    // build from the top: acc = acc * p + f_i * q^(deg-i)
    let mut q_powers = Vec::with_capacity(deg + 1);
    for _ in 0..=deg {
        q_powers.push(qpow.clone());
        qpow = &qpow * q;
    }
    for i in (0..=deg).rev() {
        acc = &(&acc * p) + &q_powers[deg - i].scale(&f.coeff(i));
    }
    acc
}

impl Add for &RatFn {
    type Output = RatFn;
    fn add(self, o: &RatFn) -> RatFn {
        if self.den == o.den {
            return RatFn::new(&self.num + &o.num, self.den.clone()).unwrap();
        }
        let g = self.den.gcd(&o.den);
        if g.is_one() {
            let num = &(&self.num * &o.den) + &(&o.num * &self.den);
            return RatFn::normalized(num, &self.den * &o.den);
        }
        let bd = self.den.div_exact(&g).unwrap();
        let dd = o.den.div_exact(&g).unwrap();
        let num = &(&self.num * &dd) + &(&o.num * &bd);
        let den = &self.den * &dd;
        let h = num.gcd(&g);
        if h.is_one() {
            RatFn::normalized(num, den)
        } else {
            RatFn::normalized(num.div_exact(&h).unwrap(), den.div_exact(&h).unwrap())
        }
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, o: &RatFn) -> RatFn {
        self + &(-o)
    }
}

impl Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, o: &RatFn) -> RatFn {
        if self.num.is_zero() || o.num.is_zero() {
            return RatFn::zero_fn();
        }
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let split = |p: &Poly, g: &Poly| {
            if g.is_one() {
                p.clone()
            } else {
                p.div_exact(g).unwrap()
            }
        };
        let num = &split(&self.num, &g1) * &split(&o.num, &g2);
        let den = &split(&self.den, &g2) * &split(&o.den, &g1);
        RatFn::normalized(num, den)
    }
}

owned_ops!(RatFn);

impl RatFn {
    fn zero_fn() -> RatFn {
        RatFn {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }
}

impl From<Poly> for RatFn {
    fn from(p: Poly) -> Self {
        RatFn::from_poly(p)
    }
}

impl Zero for RatFn {
    fn zero() -> Self {
        RatFn::zero_fn()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFn {
    fn one() -> Self {
        RatFn::from_poly(Poly::one())
    }
}

impl Field for RatFn {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        self.recip().ok()
    }
    fn from_rat(q: &Rat) -> Self {
        if q.is_zero() {
            return RatFn::zero_fn();
        }
        RatFn::constant(q.clone())
    }
    fn pow(&self, e: u32) -> Self {
        RatFn::pow(self, e)
    }
    fn show(&self, var: &str) -> String {
        self.render(var)
    }
    fn sqrt(&self) -> Option<Self> {
        RatFn::sqrt(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    fn p(cs: &[i64]) -> Poly {
        Poly::from_ints(cs)
    }

    fn u_halving() -> RatFn {
        // 4a^3(a+2)/(a^2+2a-1)^2
        let num = p(&[0, 0, 0, 8, 4]);
        let den = p(&[-1, 2, 1]).pow(2);
        RatFn::new(num, den).unwrap()
    }

    #[test]
    fn canonical_form() {
        let f = RatFn::new(p(&[-2, 0, 2]), p(&[2, 2])).unwrap();
        assert_eq!(f, RatFn::from_poly(p(&[-1, 1])));
        let g = RatFn::new(p(&[1]), p(&[0, 2])).unwrap();
        assert_eq!(g.den(), &p(&[0, 1]));
        assert_eq!(g.num(), &Poly::constant(rat(1, 2)));
        assert!(RatFn::new(p(&[1]), Poly::zero()).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let u = u_halving();
        assert_eq!(u.eval(&rat_int(-3)).unwrap(), rat_int(27));
        assert_eq!(u.eval(&rat_int(-1)).unwrap(), rat_int(-1));
        let w = RatFn::new(p(&[1]), p(&[0, 1, 0, -1])).unwrap();
        assert_eq!(w.eval(&rat(-3, 2)).unwrap(), rat(8, 15));
        assert!(matches!(w.eval(&rat_int(1)), Err(PolyError::Pole(_))));
    }

    #[test]
    fn compose_identity_and_assoc() {
        let u = u_halving();
        assert_eq!(u.compose(&RatFn::var()).unwrap(), u);
        assert_eq!(RatFn::var().compose(&u).unwrap(), u);
        let g = RatFn::new(p(&[1, 1]), p(&[0, 0, 1])).unwrap();
        let h = RatFn::new(p(&[3, 0, 1]), p(&[2, 1])).unwrap();
        let left = u.compose(&g).unwrap().compose(&h).unwrap();
        let right = u.compose(&g.compose(&h).unwrap()).unwrap();
        assert_eq!(left, right);
        let x = rat(5, 7);
        assert_eq!(
            left.eval(&x).unwrap(),
            u.eval(&g.eval(&h.eval(&x).unwrap()).unwrap()).unwrap()
        );
    }

    #[test]
    fn field_axioms_spot() {
        let a = u_halving();
        let b = RatFn::new(p(&[1, 0, 1]), p(&[0, 1, 0, -1])).unwrap();
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!((&a * &b).div(&b).unwrap(), a);
        assert_eq!(&a * &a.recip().unwrap(), RatFn::one());
    }

    #[test]
    fn render_parses_back() {
        let u = u_halving();
        assert_eq!(
            u.render("alpha"),
            "(4*alpha^4 + 8*alpha^3)/(alpha^4 + 4*alpha^3 + 2*alpha^2 - 4*alpha + 1)"
        );
        let g = RatFn::new(p(&[1]), p(&[0, 2])).unwrap();
        assert_eq!(g.render("t"), "1/(2*t)");
    }
}
