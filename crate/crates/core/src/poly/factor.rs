//! Factorization in Z[t]: Yun squarefree decomposition, modular factoring
//! with Cantor-Zassenhaus, quadratic Hensel lifting and subset recombination.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::zmod::{Fp, MPoly};
use super::zpoly::{self, ZPoly};
use super::{Poly, PolyError};
use crate::exact::{self, Int, Rat};

/// Odd primes tried when looking for a good reduction.
const CANDIDATE_PRIMES: [u64; 24] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97,
];
/// Number of good primes compared before lifting.
const PRIMES_COMPARED: usize = 3;

/// `unit * prod(p^e over content) * prod(f^e over factors)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFactorization {
    pub unit: i8,
    /// Primes of the rational content; negative exponents come from the
    /// denominator.
    pub content: Vec<(Int, i32)>,
    /// Primitive irreducible factors in Z[t] with positive leading
    /// coefficient, in canonical order.
    pub factors: Vec<(Poly, u32)>,
}

impl PolyFactorization {
    pub fn product(&self) -> Poly {
        let mut c = Rat::from_integer(Int::from(self.unit));
        for (p, e) in &self.content {
            let pe = Rat::from_integer(num_traits::pow(p.clone(), e.unsigned_abs() as usize));
            if *e >= 0 {
                c *= pe;
            } else {
                c /= pe;
            }
        }
        self.factors
            .iter()
            .fold(Poly::constant(c), |acc, (f, e)| &acc * &f.pow(*e))
    }
}

/// Complete factorization over Z[t] of a polynomial with rational
/// coefficients.
pub fn factor_z(p: &Poly) -> Result<PolyFactorization, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroInput);
    }
    let (c, z) = p.to_primitive();
    let unit = if c.is_negative() { -1 } else { 1 };
    let c = c.abs();
    let mut content: Vec<(Int, i32)> = Vec::new();
    for (part, sign) in [(c.numer(), 1i32), (c.denom(), -1i32)] {
        for (q, e) in exact::factor_int(part)?.factors {
            content.push((q, sign * e as i32));
        }
    }
    content.sort_by(|a, b| a.0.cmp(&b.0));
    let factors = factor_primitive(&z)
        .into_iter()
        .map(|(f, e)| (Poly::from_zpoly(&f), e))
        .collect();
    Ok(PolyFactorization {
        unit,
        content,
        factors,
    })
}

/// Irreducible factorization of a primitive integer polynomial with
/// positive leading coefficient.
pub fn factor_primitive(z: &[Int]) -> Vec<(ZPoly, u32)> {
    let mut z = z.to_vec();
    zpoly::trim(&mut z);
    let mut out: Vec<(ZPoly, u32)> = Vec::new();
    let low = z.iter().take_while(|c| c.is_zero()).count();
    if low > 0 {
        out.push((vec![Int::zero(), Int::one()], low as u32));
        z.drain(..low);
    }
    if z.len() > 1 {
        for (s, mult) in squarefree_decomposition(&Poly::from_zpoly(&z)) {
            let (_, sz) = s.to_primitive();
            for f in zassenhaus(&sz) {
                out.push((f, mult));
            }
        }
    }
    out.sort_by(|a, b| {
        Poly::from_zpoly(&a.0)
            .canonical_cmp(&Poly::from_zpoly(&b.0))
            .then(a.1.cmp(&b.1))
    });
    out
}

/// Yun's algorithm: pairwise coprime squarefree primitive `s_i` with
/// `p = c * prod(s_i^i)`. Constant input gives an empty list.
pub fn squarefree_decomposition(p: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    if p.is_constant() {
        return out;
    }
    let d = p.derivative();
    let c = p.gcd(&d);
    let mut w = p.div_exact(&c).expect("gcd divides");
    let mut y = d.div_exact(&c).expect("gcd divides");
    let mut i = 1u32;
    while !w.is_constant() {
        let z = &y - &w.derivative();
        let g = w.gcd(&z);
        if !g.is_constant() {
            out.push((g.primitive_part(), i));
        }
        w = w.div_exact(&g).expect("gcd divides");
        y = z.div_exact(&g).expect("gcd divides");
        i += 1;
    }
    out
}

/// Square-class representative of a nonzero polynomial: the signed
/// squarefree kernel of its content times the product of its odd-multiplicity
/// squarefree parts.
pub fn squarefree_part(p: &Poly) -> Result<Poly, PolyError> {
    let (k, f) = square_class_key(p)?;
    Ok(f.scale(&Rat::from_integer(k)))
}

/// `(signed squarefree integer, primitive squarefree polynomial)` such that
/// `p` equals their product times a square in Q(t).
pub fn square_class_key(p: &Poly) -> Result<(Int, Poly), PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroInput);
    }
    let (c, z) = p.to_primitive();
    let k = exact::square_class_of(&c)?;
    let mut f = Poly::one();
    for (s, e) in squarefree_decomposition(&Poly::from_zpoly(&z)) {
        if e % 2 == 1 {
            f = &f * &s;
        }
    }
    Ok((k, f.primitive_part()))
}

/// Square root in Q[t], if `p` is a square.
pub fn sqrt_poly(p: &Poly) -> Option<Poly> {
    if p.is_zero() {
        return Some(Poly::zero());
    }
    let mut root = Poly::one();
    let mut square = Poly::one();
    for (s, e) in squarefree_decomposition(p) {
        if e % 2 == 1 {
            return None;
        }
        let h = s.pow(e / 2);
        square = &square * &h.pow(2);
        root = &root * &h;
    }
    let c = p.div_exact(&square)?.constant_term();
    Some(root.scale(&exact::sqrt_rat(&c)?))
}

/// All rational roots, ascending and without repetition. Roots are read off
/// the linear factors of the modular factorization, so no integer
/// factorization of the constant term is needed.
pub fn rational_roots(p: &Poly) -> Result<Vec<Rat>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroInput);
    }
    let (_, z) = p.to_primitive();
    let mut roots: Vec<Rat> = factor_primitive(&z)
        .into_iter()
        .filter(|(f, _)| f.len() == 2)
        .map(|(f, _)| Rat::new(-f[0].clone(), f[1].clone()))
        .collect();
    roots.sort();
    roots.dedup();
    Ok(roots)
}

fn choose_prime(f: &[Int]) -> Option<(Fp, Vec<MPoly>)> {
    let lc = f.last().expect("nonzero");
    let mut best: Option<(Fp, Vec<MPoly>)> = None;
    let mut seen = 0;
    for &p in CANDIDATE_PRIMES.iter() {
        if (lc % Int::from(p)).is_zero() {
            continue;
        }
        let fp = Fp::new(p);
        let fm = fp.poly(f);
        if !fp.is_squarefree(&fm) {
            continue;
        }
        let facs = fp.factor_squarefree(&fm);
        seen += 1;
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((fp, facs));
        }
        if seen >= PRIMES_COMPARED || best.as_ref().is_some_and(|(_, b)| b.len() == 1) {
            break;
        }
    }
    if best.is_some() {
        return best;
    }
    // fall back to larger primes for pathological inputs
    let mut p = 101u64;
    while p < 100_000 {
        if exact::is_probable_prime(&Int::from(p)) && !(lc % Int::from(p)).is_zero() {
            let fp = Fp::new(p);
            let fm = fp.poly(f);
            if fp.is_squarefree(&fm) {
                let facs = fp.factor_squarefree(&fm);
                return Some((fp, facs));
            }
        }
        p += 2;
    }
    None
}

/// Coefficient bound for `lc(f) * g / lc(g)` over all factors `g` of `f`.
fn factor_bound(f: &[Int]) -> Int {
    let n = f.len() - 1;
    let norm2: Int = f.iter().map(|c| c * c).sum();
    let (root, _) = exact::isqrt(&norm2).expect("nonnegative");
    let lc = f.last().unwrap().abs();
    (root + 1u32) * (Int::one() << n) * lc
}

/// Irreducible factors of a primitive squarefree polynomial with positive
/// leading coefficient.
pub fn zassenhaus(f: &[Int]) -> Vec<ZPoly> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.to_vec()];
    }
    let (fp, modular) = choose_prime(f).expect("some prime gives a squarefree reduction");
    if modular.len() == 1 {
        return vec![f.to_vec()];
    }
    let bound = factor_bound(f) * 2u32;
    let p = Int::from(fp.p);
    let mut pk = p.clone();
    while pk <= bound {
        pk *= &p;
    }
    let lifted = multi_lift(f, &modular, fp, &pk);

    let mut remaining: Vec<ZPoly> = lifted;
    let mut current = f.to_vec();
    let mut found: Vec<ZPoly> = Vec::new();
    let mut size = 1usize;
    'outer: while 2 * size <= remaining.len() {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let lc = current.last().unwrap().clone();
            let mut g: ZPoly = vec![lc];
            for &i in &combo {
                g = mod_reduce(&zpoly::mul(&g, &remaining[i]), &pk);
            }
            let g = zpoly::primitive(&symmetric(&g, &pk));
            if let Some(q) = zpoly::div_exact(&current, &g) {
                found.push(g);
                current = zpoly::primitive(&q);
                for &i in combo.iter().rev() {
                    remaining.remove(i);
                }
                continue 'outer;
            }
            if !next_combination(&mut combo, remaining.len()) {
                break;
            }
        }
        size += 1;
    }
    if current.len() > 1 {
        found.push(current);
    }
    found
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn mod_reduce(a: &[Int], m: &Int) -> ZPoly {
    let mut out: ZPoly = a.iter().map(|c| c.mod_floor(m)).collect();
    zpoly::trim(&mut out);
    out
}

fn symmetric(a: &[Int], m: &Int) -> ZPoly {
    let half = m >> 1;
    let mut out: ZPoly = a
        .iter()
        .map(|c| {
            let r = c.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect();
    zpoly::trim(&mut out);
    out
}

fn mul_mod(a: &[Int], b: &[Int], m: &Int) -> ZPoly {
    mod_reduce(&zpoly::mul(a, b), m)
}

fn add_mod(a: &[Int], b: &[Int], m: &Int) -> ZPoly {
    let n = a.len().max(b.len());
    let v: ZPoly = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect();
    mod_reduce(&v, m)
}

fn sub_mod(a: &[Int], b: &[Int], m: &Int) -> ZPoly {
    mod_reduce(&zpoly::sub(a, b), m)
}

/// Division by a monic polynomial modulo `m`.
fn divrem_monic(a: &[Int], b: &[Int], m: &Int) -> (ZPoly, ZPoly) {
    let db = b.len() - 1;
    debug_assert!(b[db].is_one());
    let mut r = mod_reduce(a, m);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![Int::zero(); r.len() - db];
    for k in (db..r.len()).rev() {
        let c = r[k].mod_floor(m);
        if c.is_zero() {
            continue;
        }
        let shift = k - db;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = (&r[i + shift] - &c * bc).mod_floor(m);
        }
        q[shift] = c;
    }
    r.truncate(db);
    zpoly::trim(&mut r);
    zpoly::trim(&mut q);
    (q, r)
}

fn inv_mod(a: &Int, m: &Int) -> Int {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

fn lift_int(v: &[u64]) -> ZPoly {
    v.iter().map(|&c| Int::from(c)).collect()
}

fn make_monic(a: &[Int], m: &Int) -> ZPoly {
    let inv = inv_mod(a.last().unwrap(), m);
    mod_reduce(&a.iter().map(|c| c * &inv).collect::<Vec<_>>(), m)
}

/// Lift `f = lc * prod(factors) mod p` to monic factors modulo `target`,
/// a power of `p`.
fn multi_lift(f: &[Int], factors: &[MPoly], fp: Fp, target: &Int) -> Vec<ZPoly> {
    if factors.len() == 1 {
        return vec![make_monic(&mod_reduce(f, target), target)];
    }
    let mid = factors.len() / 2;
    let (left, right) = factors.split_at(mid);
    let lc = fp.reduce(f.last().unwrap());
    let g0 = left.iter().fold(vec![lc], |acc, h| fp.pmul(&acc, h));
    let h0 = right.iter().fold(vec![1u64], |acc, h| fp.pmul(&acc, h));
    let (one, s0, t0) = fp.xgcd(&g0, &h0);
    debug_assert_eq!(one, vec![1]);

    let (mut g, mut h, mut s, mut t) = (lift_int(&g0), lift_int(&h0), lift_int(&s0), lift_int(&t0));
    let mut m = Int::from(fp.p);
    while &m < target {
        let next = (&m * &m).min(target.clone());
        (g, h, s, t) = hensel_step(f, &g, &h, &s, &t, &next);
        m = next;
    }
    let mut out = multi_lift(&g, left, fp, target);
    out.extend(multi_lift(&h, right, fp, target));
    out
}

/// One quadratic Hensel step modulo `m2` (a divisor of the square of the
/// previous modulus).
fn hensel_step(
    f: &[Int],
    g: &[Int],
    h: &[Int],
    s: &[Int],
    t: &[Int],
    m2: &Int,
) -> (ZPoly, ZPoly, ZPoly, ZPoly) {
    let e = sub_mod(f, &mul_mod(g, h, m2), m2);
    let (q, r) = divrem_monic(&mul_mod(s, &e, m2), h, m2);
    let g1 = add_mod(&add_mod(g, &mul_mod(t, &e, m2), m2), &mul_mod(&q, g, m2), m2);
    let h1 = add_mod(h, &r, m2);
    let b = sub_mod(
        &add_mod(&mul_mod(s, &g1, m2), &mul_mod(t, &h1, m2), m2),
        &[Int::one()],
        m2,
    );
    let (c, d) = divrem_monic(&mul_mod(s, &b, m2), &h1, m2);
    let s1 = sub_mod(s, &d, m2);
    let t1 = sub_mod(&sub_mod(t, &mul_mod(t, &b, m2), m2), &mul_mod(&c, &g1, m2), m2);
    (g1, h1, s1, t1)
}

/// Degrees of the modular factors of `f` at the `count` smallest good primes.
/// Used as an irreducibility cross-check.
pub fn modular_degree_patterns(f: &[Int], count: usize) -> Vec<(u64, Vec<usize>)> {
    let lc = f.last().expect("nonzero");
    let mut out = Vec::new();
    for &p in CANDIDATE_PRIMES.iter() {
        if out.len() >= count {
            break;
        }
        if (lc % Int::from(p)).is_zero() {
            continue;
        }
        let fp = Fp::new(p);
        let fm = fp.poly(f);
        if !fp.is_squarefree(&fm) {
            continue;
        }
        let degs = fp
            .factor_squarefree(&fm)
            .iter()
            .map(|g| g.len() - 1)
            .collect();
        out.push((p, degs));
    }
    out
}

/// Integer value of a small content exponent list, for diagnostics.
pub fn content_value(content: &[(Int, i32)]) -> Rat {
    let mut c = Rat::one();
    for (p, e) in content {
        let pe = Rat::from_integer(num_traits::pow(p.clone(), e.unsigned_abs() as usize));
        if *e >= 0 {
            c *= pe;
        } else {
            c /= pe;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat_int};

    fn p(cs: &[i64]) -> Poly {
        Poly::from_ints(cs)
    }

    #[test]
    fn factor_t4_minus_t2() {
        let f = factor_z(&p(&[0, 0, -1, 0, 1])).unwrap();
        assert_eq!(f.unit, 1);
        assert!(f.content.is_empty());
        assert_eq!(
            f.factors,
            vec![(p(&[0, 1]), 2), (p(&[-1, 1]), 1), (p(&[1, 1]), 1)]
        );
    }

    #[test]
    fn factor_six_t() {
        let f = factor_z(&p(&[0, 6])).unwrap();
        assert_eq!(f.content, vec![(int(2), 1), (int(3), 1)]);
        assert_eq!(f.factors, vec![(p(&[0, 1]), 1)]);
    }

    #[test]
    fn factor_swinnerton_dyer_like() {
        // x^4 - 10x^2 + 1 is irreducible over Q but splits mod every prime
        let f = factor_z(&p(&[1, 0, -10, 0, 1])).unwrap();
        assert_eq!(f.factors, vec![(p(&[1, 0, -10, 0, 1]), 1)]);
    }

    #[test]
    fn factor_nonmonic_product() {
        let a = p(&[-4, 0, 3]);
        let b = p(&[1, 5, 0, 7]);
        let c = p(&[3, 2]);
        let prod = &(&(&a * &b) * &b) * &c;
        let f = factor_z(&prod).unwrap();
        assert_eq!(f.product(), prod);
        let mut fs: Vec<_> = f.factors.clone();
        fs.sort_by(|x, y| x.0.canonical_cmp(&y.0));
        assert_eq!(fs.len(), 3);
        assert!(fs.contains(&(a, 1)) && fs.contains(&(b, 2)) && fs.contains(&(c, 1)));
    }

    #[test]
    fn rational_roots_examples() {
        let cubic = p(&[10530, -927, 0, 1]);
        assert!(rational_roots(&cubic).unwrap().contains(&rat_int(15)));
        assert!(rational_roots(&p(&[729, -729, 0, 1])).unwrap().is_empty());
        let quartic = p(&[16, -32, 8, 0, 1]);
        assert!(rational_roots(&quartic).unwrap().contains(&rat_int(2)));
        assert_eq!(rational_roots(&Poly::zero()), Err(PolyError::ZeroInput));
        // 6x^2 - x - 1 = (3x + 1)(2x - 1)
        assert_eq!(
            rational_roots(&p(&[-1, -1, 6])).unwrap(),
            vec![crate::exact::rat(-1, 3), crate::exact::rat(1, 2)]
        );
    }

    #[test]
    fn squarefree_part_examples() {
        let a = p(&[-1, 0, 3]);
        let b = p(&[-4, 0, 3]);
        assert_eq!(squarefree_part(&(&(&a * &a) * &b)).unwrap(), b);
        assert_eq!(squarefree_part(&p(&[0, 0, 0, 0, 1])).unwrap(), Poly::one());
        assert_eq!(squarefree_part(&p(&[0, 0, 0, 0, 4])).unwrap(), Poly::one());
        assert_eq!(squarefree_part(&p(&[0, 0, 0, 0, -8])).unwrap(), p(&[-2]));
    }

    #[test]
    fn content_value_roundtrip() {
        let q = Poly::new(vec![crate::exact::rat(3, 8), crate::exact::rat(9, 4)]);
        let f = factor_z(&q).unwrap();
        let c = content_value(&f.content) * Rat::from_integer(Int::from(f.unit));
        assert_eq!(c, crate::exact::rat(3, 8));
    }
}
