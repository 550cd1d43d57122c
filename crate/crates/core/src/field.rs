//! Exact fields used as coordinate rings for curves: `Rat` and `RatFn`.

use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::exact::Rat;

pub trait Field: Clone + PartialEq + Debug + Send + Sync + Zero + One {
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    /// `None` for zero.
    fn inverse(&self) -> Option<Self>;
    fn from_rat(q: &Rat) -> Self;
    /// Text form in the expression grammar, `var` naming the parameter.
    fn show(&self, var: &str) -> String;
    /// Square root in the field, if one exists.
    fn sqrt(&self) -> Option<Self>;

    fn from_i64(n: i64) -> Self {
        Self::from_rat(&Rat::from_integer(n.into()))
    }

    fn over(&self, other: &Self) -> Option<Self> {
        other.inverse().map(|inv| self.times(&inv))
    }

    fn square(&self) -> Self {
        self.times(self)
    }

    fn scale(&self, k: i64) -> Self {
        self.times(&Self::from_i64(k))
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }
}

impl Field for Rat {
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
        (!self.is_zero()).then(|| self.recip())
    }
    fn from_rat(q: &Rat) -> Self {
        q.clone()
    }
    fn show(&self, _var: &str) -> String {
        crate::exact::fmt_rat(self)
    }
    fn sqrt(&self) -> Option<Self> {
        crate::exact::sqrt_rat(self)
    }
}
