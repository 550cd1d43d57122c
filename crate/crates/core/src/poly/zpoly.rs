//! Dense integer polynomials (coefficients low to high) used by the gcd and
//! factorization routines.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::Int;

pub type ZPoly = Vec<Int>;

pub fn trim(p: &mut ZPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &[Int]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn content(p: &[Int]) -> Int {
    p.iter().fold(Int::zero(), |g, c| g.gcd(c))
}

/// Divide by the content and make the leading coefficient positive.
pub fn primitive(p: &[Int]) -> ZPoly {
    let mut out = p.to_vec();
    trim(&mut out);
    let Some(lc) = out.last() else {
        return out;
    };
    let mut c = content(&out);
    if lc.is_negative() {
        c = -c;
    }
    if !c.is_one() {
        for x in out.iter_mut() {
            *x = &*x / &c;
        }
    }
    out
}

pub fn mul(a: &[Int], b: &[Int]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Int::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

pub fn sub(a: &[Int], b: &[Int]) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out: ZPoly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            let y = b.get(i).cloned().unwrap_or_default();
            x - y
        })
        .collect();
    trim(&mut out);
    out
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`.
pub fn prem(a: &[Int], b: &[Int]) -> ZPoly {
    let db = degree(b).expect("nonzero divisor");
    let lb = b[db].clone();
    let mut r = a.to_vec();
    trim(&mut r);
    let Some(mut dr) = degree(&r) else {
        return r;
    };
    if dr < db {
        return r;
    }
    let mut steps = dr - db + 1;
    while dr >= db && !r.is_empty() {
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        let shift = dr - db;
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &lr * c;
        }
        trim(&mut r);
        steps -= 1;
        match degree(&r) {
            Some(d) => dr = d,
            None => break,
        }
    }
    if steps > 0 && !r.is_empty() {
        let f = num_traits::pow(lb, steps);
        for c in r.iter_mut() {
            *c *= &f;
        }
    }
    r
}

/// Exact division over the integers; `None` when `b` does not divide `a`.
pub fn div_exact(a: &[Int], b: &[Int]) -> Option<ZPoly> {
    let db = degree(b)?;
    let lb = &b[db];
    let mut r = a.to_vec();
    trim(&mut r);
    let Some(da) = degree(&r) else {
        return Some(Vec::new());
    };
    if da < db {
        return None;
    }
    let mut q = vec![Int::zero(); da - db + 1];
    while let Some(dr) = degree(&r) {
        if dr < db {
            return None;
        }
        let (c, rem) = r[dr].div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &c * bc;
        }
        q[shift] = c;
        trim(&mut r);
    }
    Some(q)
}

pub fn derivative(p: &[Int]) -> ZPoly {
    let mut out: ZPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Int::from(i))
        .collect();
    trim(&mut out);
    out
}

pub fn max_abs(p: &[Int]) -> Int {
    p.iter().map(|c| c.abs()).max().unwrap_or_default()
}

/// Primitive gcd via the primitive remainder sequence; result has positive
/// leading coefficient. Both inputs zero gives zero.
pub fn gcd(a: &[Int], b: &[Int]) -> ZPoly {
    let mut a = primitive(a);
    let mut b = primitive(b);
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    if super::zmod::coprime_mod_large_prime(&a, &b) {
        return vec![Int::one()];
    }
    while !b.is_empty() {
        let r = prem(&a, &b);
        a = b;
        b = primitive(&r);
    }
    primitive(&a)
}
