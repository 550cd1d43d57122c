//! Polynomials over a prime field `Z/pZ` with word-size `p`, including
//! Cantor-Zassenhaus factorization of squarefree polynomials.

use num_bigint::Sign;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::Int;

/// Coefficients low to high, reduced, trimmed.
pub type MPoly = Vec<u64>;

/// 2^61 - 1.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        Fp { p }
    }

    pub fn reduce(&self, n: &Int) -> u64 {
        let m = Int::from(self.p);
        let mut r = n % &m;
        if r.sign() == Sign::Minus {
            r += &m;
        }
        r.to_u64().expect("reduced")
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.p as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + self.p as u128 - b as u128) % self.p as u128) as u64
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1u64 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }

    pub fn poly(&self, z: &[Int]) -> MPoly {
        let mut out: MPoly = z.iter().map(|c| self.reduce(c)).collect();
        trim(&mut out);
        out
    }

    pub fn padd(&self, a: &[u64], b: &[u64]) -> MPoly {
        let n = a.len().max(b.len());
        let mut out: MPoly = (0..n)
            .map(|i| self.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        trim(&mut out);
        out
    }

    pub fn psub(&self, a: &[u64], b: &[u64]) -> MPoly {
        let n = a.len().max(b.len());
        let mut out: MPoly = (0..n)
            .map(|i| self.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect();
        trim(&mut out);
        out
    }

    pub fn pmul(&self, a: &[u64], b: &[u64]) -> MPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        trim(&mut out);
        out
    }

    pub fn pscale(&self, a: &[u64], k: u64) -> MPoly {
        let mut out: MPoly = a.iter().map(|&c| self.mul(c, k)).collect();
        trim(&mut out);
        out
    }

    pub fn monic(&self, a: &[u64]) -> MPoly {
        match a.last() {
            None => Vec::new(),
            Some(&lc) => self.pscale(a, self.inv(lc)),
        }
    }

    pub fn divrem(&self, a: &[u64], b: &[u64]) -> (MPoly, MPoly) {
        let db = b.len() - 1;
        let inv = self.inv(b[db]);
        let mut r = a.to_vec();
        trim(&mut r);
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - db];
        while r.len() > db {
            let dr = r.len() - 1;
            let c = self.mul(r[dr], inv);
            let shift = dr - db;
            q[shift] = c;
            for (i, &bc) in b.iter().enumerate() {
                r[i + shift] = self.sub(r[i + shift], self.mul(c, bc));
            }
            trim(&mut r);
            if r.len() <= db {
                break;
            }
        }
        trim(&mut q);
        (q, r)
    }

    pub fn rem(&self, a: &[u64], b: &[u64]) -> MPoly {
        self.divrem(a, b).1
    }

    /// Monic gcd.
    pub fn gcd(&self, a: &[u64], b: &[u64]) -> MPoly {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// Extended Euclid: `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn xgcd(&self, a: &[u64], b: &[u64]) -> (MPoly, MPoly, MPoly) {
        let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
        let (mut s0, mut s1): (MPoly, MPoly) = (vec![1], Vec::new());
        let (mut t0, mut t1): (MPoly, MPoly) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = self.divrem(&r0, &r1);
            let s2 = self.psub(&s0, &self.pmul(&q, &s1));
            let t2 = self.psub(&t0, &self.pmul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let lc = *r0.last().expect("not both zero");
        let inv = self.inv(lc);
        (
            self.pscale(&r0, inv),
            self.pscale(&s0, inv),
            self.pscale(&t0, inv),
        )
    }

    pub fn derivative(&self, a: &[u64]) -> MPoly {
        let mut out: MPoly = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.mul(c, i as u64 % self.p))
            .collect();
        trim(&mut out);
        out
    }

    pub fn powmod(&self, base: &[u64], mut e: u64, m: &[u64]) -> MPoly {
        let mut acc: MPoly = vec![1];
        let mut b = self.rem(base, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.rem(&self.pmul(&acc, &b), m);
            }
            e >>= 1;
            if e > 0 {
                b = self.rem(&self.pmul(&b, &b), m);
            }
        }
        self.rem(&acc, m)
    }

    pub fn is_squarefree(&self, a: &[u64]) -> bool {
        let d = self.derivative(a);
        !d.is_empty() && self.gcd(a, &d).len() == 1
    }

    /// Distinct-degree factorization of a monic squarefree polynomial.
    pub fn ddf(&self, f: &[u64]) -> Vec<(MPoly, usize)> {
        let mut out = Vec::new();
        let mut rest = f.to_vec();
        let x: MPoly = vec![0, 1];
        let mut h = x.clone();
        let mut d = 0usize;
        while rest.len() > 1 {
            d += 1;
            if 2 * d > rest.len() - 1 {
                out.push((rest.clone(), rest.len() - 1));
                break;
            }
            h = self.powmod(&h, self.p, &rest);
            let g = self.gcd(&self.psub(&h, &x), &rest);
            if g.len() > 1 {
                rest = self.divrem(&rest, &g).0;
                h = self.rem(&h, &rest);
                out.push((g, d));
            }
        }
        out
    }

    /// Equal-degree splitting (odd `p`) of a product of degree-`d` factors.
    pub fn edf(&self, f: &[u64], d: usize, rng: &mut ChaCha8Rng) -> Vec<MPoly> {
        let n = f.len() - 1;
        if n == d {
            return vec![f.to_vec()];
        }
        loop {
            let mut a: MPoly = (0..n).map(|_| rng.random_range(0..self.p)).collect();
            trim(&mut a);
            if a.len() < 2 {
                continue;
            }
            // a^((p^d - 1)/2) = (a * a^p * ... * a^(p^(d-1)))^((p-1)/2)
            let mut frob = a.clone();
            let mut norm = a.clone();
            for _ in 1..d {
                frob = self.powmod(&frob, self.p, f);
                norm = self.rem(&self.pmul(&norm, &frob), f);
            }
            let b = self.powmod(&norm, (self.p - 1) / 2, f);
            let g = self.gcd(&self.psub(&b, &[1]), f);
            if g.len() > 1 && g.len() < f.len() {
                let h = self.divrem(f, &g).0;
                let mut out = self.edf(&g, d, rng);
                out.extend(self.edf(&self.monic(&h), d, rng));
                return out;
            }
        }
    }

    /// Monic irreducible factors of a squarefree polynomial, sorted.
    pub fn factor_squarefree(&self, f: &[u64]) -> Vec<MPoly> {
        assert!(self.p > 2, "odd characteristic only");
        let f = self.monic(f);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ self.p);
        let mut out = Vec::new();
        for (g, d) in self.ddf(&f) {
            out.extend(self.edf(&g, d, &mut rng));
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

pub fn trim(p: &mut MPoly) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Sufficient test for coprimality over Q: the images modulo 2^61-1 are
/// coprime and no leading coefficient vanishes.
pub fn coprime_mod_large_prime(a: &[Int], b: &[Int]) -> bool {
    let fp = Fp::new(MERSENNE_61);
    let (Some(la), Some(lb)) = (a.last(), b.last()) else {
        return false;
    };
    if la.is_zero() || lb.is_zero() || fp.reduce(la) == 0 || fp.reduce(lb) == 0 {
        return false;
    }
    let g = fp.gcd(&fp.poly(a), &fp.poly(b));
    g.len() == 1
}
