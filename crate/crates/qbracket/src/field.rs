//! Minimal field abstraction shared by the exact linear algebra.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt::Debug;

pub type Rat = BigRational;

/// Build a rational from two machine integers.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parse `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Rising factorial x(x+1)...(x+n-1).
pub fn rising(x: &Rat, n: u64) -> Rat {
    let mut acc = Rat::one();
    for i in 0..n {
        acc *= x + rat_int(i as i64);
    }
    acc
}

/// Falling factorial x(x-1)...(x-n+1).
pub fn falling(x: &Rat, n: u64) -> Rat {
    let mut acc = Rat::one();
    for i in 0..n {
        acc *= x - rat_int(i as i64);
    }
    acc
}

/// Fractional part in [0, 1).
pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

pub fn rat_abs(x: &Rat) -> Rat {
    x.abs()
}

/// Operations needed by Gaussian elimination.
pub trait Field: Clone + PartialEq + Debug + Send + Sync {
    fn f_zero() -> Self;
    fn f_one() -> Self;
    fn f_is_zero(&self) -> bool;
    fn f_add(&self, other: &Self) -> Self;
    fn f_sub(&self, other: &Self) -> Self;
    fn f_mul(&self, other: &Self) -> Self;
    fn f_neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn f_inv(&self) -> Option<Self>;
}

impl Field for Rat {
    fn f_zero() -> Self {
        Zero::zero()
    }
    fn f_one() -> Self {
        One::one()
    }
    fn f_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn f_add(&self, other: &Self) -> Self {
        self + other
    }
    fn f_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn f_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn f_neg(&self) -> Self {
        -self
    }
    fn f_inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}
