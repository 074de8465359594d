//! Bernoulli numbers and the constant terms β_k(a), α_k(a), α̃_k(a).
//!
//! All generating functions are read in the normalized variable w = 2πi z with
//! y = e(a), so every constant lies in a cyclotomic field.

use crate::cyclotomic::{cyc_root, CycQ};
use crate::field::{binomial, factorial, rat, Rat};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Truncated Laurent series Σ_{j} c_j w^{val+j} over CycQ.
#[derive(Clone, Debug, PartialEq)]
pub struct CLaurent {
    pub val: i64,
    pub coeffs: Vec<CycQ>,
}

impl CLaurent {
    /// Series known up to (excluding) w^(val + coeffs.len()).
    pub fn new(val: i64, coeffs: Vec<CycQ>) -> Self {
        CLaurent { val, coeffs }
    }

    pub fn trunc(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    pub fn coeff(&self, e: i64) -> CycQ {
        assert!(e < self.trunc(), "w^{} beyond truncation {}", e, self.trunc());
        if e < self.val {
            return CycQ::zero();
        }
        self.coeffs[(e - self.val) as usize].clone()
    }

    /// exp(c w) to O(w^n).
    pub fn exp_scaled(c: &CycQ, n: usize) -> Self {
        let mut coeffs = Vec::with_capacity(n);
        let mut p = CycQ::one();
        for j in 0..n {
            coeffs.push(p.scale(&Rat::new(BigInt::one(), factorial(j as u64))));
            p = &p * c;
        }
        CLaurent::new(0, coeffs)
    }

    pub fn add(&self, other: &CLaurent) -> CLaurent {
        let val = self.val.min(other.val);
        let trunc = self.trunc().min(other.trunc());
        let coeffs = (val..trunc).map(|e| &self.coeff(e) + &other.coeff(e)).collect();
        CLaurent::new(val, coeffs)
    }

    pub fn mul(&self, other: &CLaurent) -> CLaurent {
        let val = self.val + other.val;
        let trunc = (self.trunc() + other.val).min(other.trunc() + self.val);
        let n = (trunc - val).max(0) as usize;
        let mut coeffs = vec![CycQ::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                coeffs[i + j] += &(a * b);
            }
        }
        CLaurent::new(val, coeffs)
    }

    /// Inverse; leading zeros are stripped first.
    pub fn invert(&self) -> CLaurent {
        let skip = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        let c = &self.coeffs[skip..];
        assert!(!c.is_empty(), "inverse of a series with no known nonzero term");
        let v = self.val + skip as i64;
        let c0inv = c[0].inverse().unwrap();
        let n = c.len();
        let mut b: Vec<CycQ> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                b.push(c0inv.clone());
                continue;
            }
            let mut acc = CycQ::zero();
            for j in 1..=k {
                if !c[j].is_zero() {
                    acc += &(&c[j] * &b[k - j]);
                }
            }
            b.push(-(&acc * &c0inv));
        }
        CLaurent::new(-v, b)
    }

    pub fn scale(&self, c: &CycQ) -> CLaurent {
        CLaurent::new(self.val, self.coeffs.iter().map(|x| x * c).collect())
    }
}

fn bernoulli_cache() -> &'static Mutex<Vec<Rat>> {
    static CACHE: OnceLock<Mutex<Vec<Rat>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![Rat::one()]))
}

/// Bernoulli number B_n with B_1 = −1/2 (from Σ_{j≤n} C(n+1,j) B_j = 0).
pub fn bernoulli(n: usize) -> Rat {
    let mut cache = bernoulli_cache().lock().unwrap();
    while cache.len() <= n {
        let m = cache.len();
        let s: Rat = (0..m).map(|j| Rat::from_integer(binomial(m as i64 + 1, j as i64)) * &cache[j]).sum();
        cache.push(-s / Rat::from_integer(BigInt::from(m + 1)));
    }
    cache[n].clone()
}

/// −B_k/(2k), the constant term shared by Q_k, S_k, H_k, T_{k,l}.
pub fn bernoulli_constant(k: usize) -> Rat {
    -bernoulli(k) / Rat::from_integer(BigInt::from(2 * k as i64))
}

type ConstCache = Mutex<HashMap<(u8, i64, Rat), CycQ>>;

fn const_cache() -> &'static ConstCache {
    static CACHE: OnceLock<ConstCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(kind: u8, k: i64, a: &Rat, f: impl FnOnce() -> CycQ) -> CycQ {
    let key = (kind, k, a - a.floor());
    if let Some(v) = const_cache().lock().unwrap().get(&key) {
        return v.clone();
    }
    let v = f();
    const_cache().lock().unwrap().insert(key, v.clone());
    v
}

/// e(a)·e^w − 1 to O(w^n).
fn shifted_exp_minus_one(a: &Rat, n: usize) -> CLaurent {
    let y = cyc_root(a);
    let mut s = CLaurent::exp_scaled(&CycQ::one(), n).scale(&y);
    s.coeffs[0] -= &CycQ::one();
    s
}

/// β_k(a): Σ_k β_k(a) w^{k−1} = e^{w/2}/(e^w e(a) − 1).
pub fn beta(k: i64, a: &Rat) -> CycQ {
    assert!(k >= 0);
    cached(0, k, a, || {
        let n = k as usize + 3;
        let num = CLaurent::exp_scaled(&CycQ::from_rat(rat(1, 2)), n);
        let series = num.mul(&shifted_exp_minus_one(a, n).invert());
        series.coeff(k - 1)
    })
}

/// α_k(a) from ½/(1 − e(a)e^w) = α_{−1}(a)/w + Σ_{k≥1} α_k(a) w^{k−1}/(k−1)!; α_0 := 0.
pub fn alpha(k: i64, a: &Rat) -> CycQ {
    assert!(k >= -1);
    if k == 0 {
        return CycQ::zero();
    }
    cached(1, k, a, || {
        let n = k.max(0) as usize + 3;
        let series = shifted_exp_minus_one(a, n).invert().scale(&CycQ::from_rat(rat(-1, 2)));
        if k == -1 {
            series.coeff(-1)
        } else {
            series.coeff(k - 1).scale(&Rat::from_integer(factorial(k as u64 - 1)))
        }
    })
}

/// α̃_k(a) from (1/8) sinh((w + 2πia)/2)^{−2} = ½ e(a)e^w/(e(a)e^w − 1)²; k ≥ 2 or k ∈ {−2, −1}.
pub fn alpha_tilde(k: i64, a: &Rat) -> CycQ {
    assert!(k >= -2 && k != 0 && k != 1, "α̃_k needs k ≥ 2 or k ∈ {{−2,−1}}");
    cached(2, k, a, || {
        let n = k.max(0) as usize + 4;
        let y = cyc_root(a);
        let den = shifted_exp_minus_one(a, n);
        let num = CLaurent::exp_scaled(&CycQ::one(), n).scale(&y.scale(&rat(1, 2)));
        let series = num.mul(&den.mul(&den).invert());
        if k < 0 {
            series.coeff(k)
        } else {
            series.coeff(k - 2).scale(&Rat::from_integer(factorial(k as u64 - 2)))
        }
    })
}

/// True if the rational is an integer.
pub fn is_integral(a: &Rat) -> bool {
    a.is_integer()
}

/// Zero test helper for rationals.
pub fn rat_is_zero(a: &Rat) -> bool {
    a.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat_int;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
        assert_eq!(bernoulli(7), rat_int(0));
    }

    #[test]
    fn beta_examples() {
        let z = rat_int(0);
        assert_eq!(beta(0, &z), CycQ::one());
        assert_eq!(beta(1, &z), CycQ::zero());
        assert_eq!(beta(2, &z), CycQ::from_rat(rat(-1, 24)));
        assert_eq!(beta(1, &rat(1, 2)), CycQ::from_rat(rat(-1, 2)));
        assert_eq!(beta(0, &rat(1, 3)), CycQ::zero());
        assert_eq!(beta(3, &rat(3, 2)), beta(3, &rat(1, 2)));
    }

    #[test]
    fn beta_is_bernoulli_at_zero() {
        // e^{w/2}/(e^w − 1) has coefficients B_k(1/2)/k!
        for k in 0..8usize {
            let half = rat(1, 2);
            let bk: Rat = (0..=k)
                .map(|j| Rat::from_integer(binomial(k as i64, j as i64)) * bernoulli(j) * num_traits::pow(half.clone(), k - j))
                .sum();
            let expected = bk / Rat::from_integer(factorial(k as u64));
            assert_eq!(beta(k as i64, &rat_int(0)), CycQ::from_rat(expected));
        }
    }

    #[test]
    fn alpha_matches_alpha_tilde_from_two_on() {
        for a in [rat_int(0), rat(1, 2), rat(1, 3), rat(1, 4)] {
            for k in 2..8 {
                assert_eq!(alpha(k, &a), alpha_tilde(k, &a), "k={k} a={a}");
            }
        }
        assert_eq!(alpha(2, &rat_int(0)), CycQ::from_rat(bernoulli_constant(2)));
        assert_eq!(alpha(4, &rat_int(0)), CycQ::from_rat(bernoulli_constant(4)));
        assert_eq!(alpha(-1, &rat_int(0)), CycQ::from_rat(rat(-1, 2)));
        assert_eq!(alpha(1, &rat(1, 2)), CycQ::from_rat(rat(1, 4)));
    }

    #[test]
    fn alpha_tilde_at_zero_is_hook_constant() {
        for k in [2usize, 4, 6, 8] {
            assert_eq!(alpha_tilde(k as i64, &rat_int(0)), CycQ::from_rat(bernoulli_constant(k)));
        }
        assert_eq!(alpha_tilde(-2, &rat_int(0)), CycQ::from_rat(rat(1, 2)));
    }
}
