//! Arbitrary-precision integers and rationals, square testing and
//! small-scale integer factorization.
//!
//! `Int` and `Rat` are the `num` crate's big integer and big rational; both
//! are kept in canonical form by construction (`BigRational::new` reduces and
//! forces a positive denominator).

use std::fmt::Write as _;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Int = BigInt;
pub type Rat = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("square root of negative integer {0}")]
    NegativeSqrt(Int),
    #[error("cannot factor zero")]
    FactorZero,
    #[error("malformed rational literal {0:?}")]
    BadRational(String),
}

/// Trial division bound before switching to Pollard rho.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// Miller-Rabin with bases 2..17 is deterministic below this value.
pub const DETERMINISTIC_MR_LIMIT: u64 = 341_550_071_728_321;

const MR_SMALL_BASES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];

/// Witness count used above the deterministic range.
pub const MR_WITNESS_COUNT: usize = 25;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Floor square root with an exactness flag.
pub fn isqrt(n: &Int) -> Result<(Int, bool), ExactError> {
    if n.is_negative() {
        return Err(ExactError::NegativeSqrt(n.clone()));
    }
    let root = n.sqrt();
    let exact = &root * &root == *n;
    Ok((root, exact))
}

pub fn is_square_int(n: &Int) -> bool {
    !n.is_negative() && isqrt(n).map(|(_, e)| e).unwrap_or(false)
}

/// True iff `q` is the square of a rational number.
pub fn is_square(q: &Rat) -> bool {
    !q.is_negative() && is_square_int(q.numer()) && is_square_int(q.denom())
}

/// Exact rational square root, if there is one.
pub fn sqrt_rat(q: &Rat) -> Option<Rat> {
    if q.is_negative() {
        return None;
    }
    let (n, en) = isqrt(q.numer()).ok()?;
    let (d, ed) = isqrt(q.denom()).ok()?;
    (en && ed).then(|| Rat::new(n, d))
}

/// Sign and prime-power decomposition of a nonzero integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntFactorization {
    pub sign: i8,
    /// Primes in ascending order with their exponents.
    pub factors: Vec<(Int, u32)>,
}

impl IntFactorization {
    pub fn product(&self) -> Int {
        let mut acc = Int::from(self.sign);
        for (p, e) in &self.factors {
            acc *= num_traits::pow(p.clone(), *e as usize);
        }
        acc
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<Int> {
        let mut divs = vec![Int::one()];
        for (p, e) in &self.factors {
            let mut next = Vec::with_capacity(divs.len() * (*e as usize + 1));
            for d in &divs {
                let mut pk = d.clone();
                next.push(pk.clone());
                for _ in 0..*e {
                    pk *= p;
                    next.push(pk.clone());
                }
            }
            divs = next;
        }
        divs.sort();
        divs
    }
}

/// Factor a nonzero integer: trial division to [`TRIAL_DIVISION_BOUND`],
/// then Pollard rho (Brent) on the cofactor.
pub fn factor_int(n: &Int) -> Result<IntFactorization, ExactError> {
    if n.is_zero() {
        return Err(ExactError::FactorZero);
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut primes: Vec<Int> = Vec::new();

    let mut d: u64 = 2;
    while d <= TRIAL_DIVISION_BOUND {
        if let Some(mut small) = m.to_u128() {
            // native loop once the cofactor fits
            while d <= TRIAL_DIVISION_BOUND && (d as u128) * (d as u128) <= small {
                while small % d as u128 == 0 {
                    small /= d as u128;
                    primes.push(Int::from(d));
                }
                d += if d == 2 { 1 } else { 2 };
            }
            m = Int::from(small);
            break;
        }
        let dd = Int::from(d);
        if &dd * &dd > m {
            break;
        }
        while (&m % &dd).is_zero() {
            m /= &dd;
            primes.push(dd.clone());
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        split_cofactor(m, &mut primes);
    }
    primes.sort();
    let mut factors: Vec<(Int, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(IntFactorization { sign, factors })
}

fn split_cofactor(m: Int, out: &mut Vec<Int>) {
    if m.is_one() {
        return;
    }
    if is_probable_prime(&m) {
        out.push(m);
        return;
    }
    if let (r, true) = isqrt(&m).expect("positive") {
        split_cofactor(r.clone(), out);
        split_cofactor(r, out);
        return;
    }
    let mut c = 1u64;
    loop {
        if let Some(f) = pollard_brent(&m, c) {
            let other = &m / &f;
            split_cofactor(f, out);
            split_cofactor(other, out);
            return;
        }
        c += 1;
    }
}

fn pollard_brent(n: &Int, c: u64) -> Option<Int> {
    if n.is_even() {
        return Some(Int::from(2));
    }
    let c = Int::from(c);
    let f = |x: &Int| (x * x + &c) % n;
    let mut y = Int::from(2);
    let mut r: u64 = 1;
    let mut q = Int::one();
    let m: u64 = 128;
    let mut g = Int::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (q * (&x - &y).abs()) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
        if r > 1 << 26 {
            return None;
        }
    }
    if g == *n {
        loop {
            ys = f(&ys);
            g = (&x - &ys).abs().gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (g != *n).then_some(g)
}

/// Miller-Rabin: deterministic below [`DETERMINISTIC_MR_LIMIT`], otherwise
/// the first [`MR_WITNESS_COUNT`] primes as fixed witnesses.
pub fn is_probable_prime(n: &Int) -> bool {
    if *n < Int::from(2) {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let p = Int::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let bases: Vec<u64> = if n.to_u64().is_some_and(|v| v < DETERMINISTIC_MR_LIMIT) {
        MR_SMALL_BASES.to_vec()
    } else {
        first_primes(MR_WITNESS_COUNT)
    };
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for a in bases {
        let a = Int::from(a) % n;
        if a.is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&Int::from(2), n);
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut k = 2u64;
    while out.len() < count {
        if (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0) {
            out.push(k);
        }
        k += 1;
    }
    out
}

/// Squarefree kernel of a nonzero integer, sign preserved: the unique
/// squarefree `s` with `n = s * m^2`.
pub fn squarefree_kernel(n: &Int) -> Result<Int, ExactError> {
    let f = factor_int(n)?;
    let mut acc = Int::from(f.sign);
    for (p, e) in f.factors {
        if e % 2 == 1 {
            acc *= p;
        }
    }
    Ok(acc)
}

/// Squarefree integer representing the square class of a nonzero rational.
pub fn square_class_of(q: &Rat) -> Result<Int, ExactError> {
    squarefree_kernel(&(q.numer() * q.denom()))
}

/// Canonical text form: `p/q`, or `p` when the denominator is one.
pub fn fmt_rat(q: &Rat) -> String {
    let mut s = String::new();
    if q.denom().is_one() {
        let _ = write!(s, "{}", q.numer());
    } else {
        let _ = write!(s, "{}/{}", q.numer(), q.denom());
    }
    s
}

/// Parse `p`, `-p` or `p/q` (integers only, no whitespace inside).
pub fn parse_rat(text: &str) -> Result<Rat, ExactError> {
    let bad = || ExactError::BadRational(text.to_string());
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: Int = n.parse().map_err(|_| bad())?;
    let d: Int = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

pub fn lcm_int(a: &Int, b: &Int) -> Int {
    if a.is_zero() || b.is_zero() {
        return Int::zero();
    }
    a.lcm(b)
}

pub fn sign_of(n: &Int) -> i8 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn square_examples() {
        assert!(is_square(&rat(4, 9)));
        assert!(!is_square(&rat(23, 4)));
        assert!(is_square(&rat_int(1)));
        assert!(!is_square(&rat_int(-1)));
        assert!(is_square(&rat_int(0)));
    }

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(&int(729)).unwrap(), (int(27), true));
        assert_eq!(isqrt(&int(730)).unwrap(), (int(27), false));
        assert_eq!(isqrt(&int(0)).unwrap(), (int(0), true));
        assert!(matches!(isqrt(&int(-4)), Err(ExactError::NegativeSqrt(_))));
    }

    #[test]
    fn factor_examples() {
        let f = factor_int(&int(10530)).unwrap();
        assert_eq!(f.sign, 1);
        assert_eq!(
            f.factors,
            vec![(int(2), 1), (int(3), 4), (int(5), 1), (int(13), 1)]
        );
        let f = factor_int(&int(-16)).unwrap();
        assert_eq!((f.sign, f.factors), (-1, vec![(int(2), 4)]));
        let f = factor_int(&int(1)).unwrap();
        assert_eq!((f.sign, f.factors.len()), (1, 0));
        assert_eq!(factor_int(&int(0)), Err(ExactError::FactorZero));
    }

    #[test]
    fn factor_beyond_trial_bound() {
        // two primes above the trial-division bound
        let p: Int = "1000003".parse().unwrap();
        let q: Int = "1000033".parse().unwrap();
        let f = factor_int(&(&p * &q * &p)).unwrap();
        assert_eq!(f.factors, vec![(p.clone(), 2), (q.clone(), 1)]);
        let big: Int = "1000000000000000003".parse().unwrap();
        assert!(is_probable_prime(&big));
        let f = factor_int(&(&big * 6)).unwrap();
        assert_eq!(f.factors, vec![(int(2), 1), (int(3), 1), (big, 1)]);
    }

    #[test]
    fn carmichael_is_composite() {
        for n in [561i64, 1105, 1729, 2465, 2821, 6601, 3_215_031_751] {
            assert!(!is_probable_prime(&int(n)), "{n}");
        }
    }

    #[test]
    fn divisors_of_twelve() {
        let d = factor_int(&int(12)).unwrap().divisors();
        assert_eq!(d, [1, 2, 3, 4, 6, 12].map(int).to_vec());
    }

    #[test]
    fn rational_text_roundtrip() {
        for (s, q) in [("8/15", rat(8, 15)), ("-3/2", rat(-3, 2)), ("27", rat_int(27))] {
            assert_eq!(parse_rat(s).unwrap(), q);
            assert_eq!(fmt_rat(&q), s);
        }
        assert!(parse_rat("1/0").is_err());
        assert_eq!(fmt_rat(&parse_rat("4/-6").unwrap()), "-2/3");
    }

    proptest! {
        #[test]
        fn square_invariant_under_square_scaling(
            n in -10_000i64..10_000, d in 1i64..10_000,
            rn in 1i64..1000, rd in 1i64..1000,
        ) {
            let q = rat(n, d);
            let r = rat(rn, rd);
            prop_assert_eq!(is_square(&q), is_square(&(&q * &r * &r)));
        }

        #[test]
        fn factor_reconstructs(n in prop::num::i64::ANY.prop_filter("nonzero", |v| *v != 0)) {
            let f = factor_int(&int(n)).unwrap();
            prop_assert_eq!(f.product(), int(n));
            for (p, _) in &f.factors {
                prop_assert!(is_probable_prime(p));
            }
        }

        #[test]
        fn isqrt_brackets(n in 0u64..u64::MAX) {
            let n = Int::from(n);
            let (r, _) = isqrt(&n).unwrap();
            prop_assert!(&r * &r <= n);
            let r1 = r + 1u32;
            prop_assert!(&r1 * &r1 > n);
        }
    }
}
