//! Partition-function families and their exact evaluation.

use crate::constants::{alpha, alpha_tilde, bernoulli_constant, beta};
use crate::cyclotomic::{cyc_root, CycQ};
use crate::field::{factorial, fmt_rat, rat, rat_int, Rat};
use crate::partition::Partition;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("bad family parameter: {0}")]
    BadParam(String),
    #[error("function only defined on partitions of size ≤ {bound}, evaluated at size {size}")]
    TruncExceeded { bound: u32, size: u32 },
}

/// The named families of partition functions.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// Q_k(·, a); a = 0 gives the shifted symmetric Q_k.
    Q { k: i64, a: Rat },
    /// Q_k^{(m)} = Q_k − (1/m) Σ_a e(a/m) Q_k(·, 2a/m).
    Qm { k: i64, m: i64 },
    /// H_k (a = 0 uses −B_k/2k) or H_k(·, a).
    H { k: i64, a: Rat },
    /// H_k^t.
    Ht { k: i64, t: i64 },
    /// S_k (a = 0 uses −B_k/2k) or S_k(·, a).
    S { k: i64, a: Rat },
    /// S_k^t.
    St { k: i64, t: i64 },
    /// T_{k,l}, or T_{k,l}(·, a, b) when (a, b) ≠ (0, 0).
    T { k: i64, l: i64, a: Rat, b: Rat },
    /// T_{k,l}^{s,t}.
    Tst { k: i64, l: i64, s: i64, t: i64 },
}

fn bad(msg: impl Into<String>) -> FamilyError {
    FamilyError::BadParam(msg.into())
}

fn level_of(a: &Rat) -> u64 {
    let d: u64 = (a - a.floor()).denom().try_into().unwrap_or(1);
    d
}

impl Family {
    pub fn q(k: i64) -> Self {
        Family::Q { k, a: rat_int(0) }
    }

    pub fn qa(k: i64, a: Rat) -> Self {
        Family::Q { k, a }
    }

    pub fn h(k: i64) -> Self {
        Family::H { k, a: rat_int(0) }
    }

    pub fn s(k: i64) -> Self {
        Family::S { k, a: rat_int(0) }
    }

    pub fn t(k: i64, l: i64) -> Self {
        Family::T { k, l, a: rat_int(0), b: rat_int(0) }
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        match self {
            Family::Q { k, .. } if *k < 0 => Err(bad(format!("Q needs k ≥ 0, got {k}"))),
            Family::Qm { k, m } if *k < 1 || *m < 1 => Err(bad("Q^(m) needs k, m ≥ 1")),
            Family::H { k, .. } if *k < 2 => Err(bad(format!("H needs k ≥ 2, got {k}"))),
            Family::Ht { k, t } if *k < 1 || *t < 1 => Err(bad("H^t needs k, t ≥ 1")),
            Family::S { k, .. } if *k < 1 => Err(bad(format!("S needs k ≥ 1, got {k}"))),
            Family::St { k, t } if *k < 1 || *t < 1 => Err(bad("S^t needs k, t ≥ 1")),
            Family::T { k, l, .. } if *k < 0 || *l < 1 => Err(bad(format!("T needs k ≥ 0, l ≥ 1, got ({k},{l})"))),
            Family::Tst { k, l, s, t } if *k < 1 || *l < 1 || *s < 1 || *t < 1 => Err(bad("T^{s,t} needs positive parameters")),
            _ => Ok(()),
        }
    }

    pub fn weight(&self) -> i64 {
        match self {
            Family::Q { k, .. } | Family::Qm { k, .. } | Family::H { k, .. } | Family::Ht { k, .. } => *k,
            Family::S { k, .. } | Family::St { k, .. } => *k,
            Family::T { k, l, .. } | Family::Tst { k, l, .. } => k + l,
        }
    }

    pub fn level(&self) -> u64 {
        match self {
            Family::Q { a, .. } | Family::H { a, .. } | Family::S { a, .. } => level_of(a),
            Family::Qm { m, .. } => *m as u64,
            Family::Ht { t, .. } | Family::St { t, .. } => *t as u64,
            Family::T { a, b, .. } => level_of(a).lcm(&level_of(b)),
            Family::Tst { s, t, .. } => (*s as u64).lcm(&(*t as u64)),
        }
    }

    /// Exact value on a partition.
    pub fn eval(&self, p: &Partition) -> Result<CycQ, FamilyError> {
        self.validate()?;
        Ok(match self {
            Family::Q { k, a } => eval_q(*k, a, p),
            Family::Qm { k, m } => {
                let mut acc = eval_q(*k, &rat_int(0), p);
                let mut avg = CycQ::zero();
                for j in 0..*m {
                    let twist = cyc_root(&rat(j, *m));
                    avg += &(&twist * &eval_q(*k, &rat(2 * j, *m), p));
                }
                acc -= &avg.scale(&rat(1, *m));
                acc
            }
            Family::H { k, a } => eval_h(*k, a, p),
            Family::Ht { k, t } => {
                let c = bernoulli_constant(*k as usize) * pow_rat(*t, *k);
                let s: BigInt = p.hooks().iter().filter(|&&h| h as i64 % t == 0).map(|&h| pow_int(h as i64, k - 2)).sum();
                CycQ::from_rat(c + Rat::from_integer(s))
            }
            Family::S { k, a } => eval_s(*k, a, p),
            Family::St { k, t } => {
                let c = bernoulli_constant(*k as usize) * pow_rat(*t, *k);
                let s: BigInt = p.parts().iter().filter(|&&x| x as i64 % t == 0).map(|&x| pow_int(x as i64, k - 1)).sum();
                CycQ::from_rat(c + Rat::from_integer(s))
            }
            Family::T { k, l, a, b } => eval_t(*k, *l, a, b, p),
            Family::Tst { k, l, s, t } => {
                let c = if *k == 0 || *l == 1 { bernoulli_constant((k + l) as usize) } else { Rat::zero() };
                let mut total = c;
                for (m, r) in p.multiplicities() {
                    if m as i64 % s != 0 {
                        continue;
                    }
                    let base = m as i64 / s;
                    let n = r as i64 / t;
                    total += Rat::from_integer(pow_int(base, *k) * seki(n, *l));
                }
                CycQ::from_rat(total)
            }
        })
    }

    pub fn function(&self) -> Result<PartitionFunction, FamilyError> {
        self.validate()?;
        let fam = self.clone();
        Ok(PartitionFunction::new(self.to_string(), self.weight(), self.level(), move |p| fam.eval(p)))
    }
}

fn pow_int(b: i64, e: i64) -> BigInt {
    if e < 0 {
        panic!("negative integer power");
    }
    num_traits::pow(BigInt::from(b), e as usize)
}

fn pow_rat(b: i64, e: i64) -> Rat {
    Rat::from_integer(pow_int(b, e))
}

/// Seki–Bernoulli 𝓕_l(n) = Σ_{i=1}^n i^{l−1}.
pub fn seki(n: i64, l: i64) -> BigInt {
    (1..=n).map(|i| pow_int(i, l - 1)).sum()
}

/// Twisted 𝓕_l^b(n) = Σ_{i=1}^n e(bi) i^{l−1}.
pub fn seki_twisted(n: i64, l: i64, b: &Rat) -> CycQ {
    let mut acc = CycQ::zero();
    for i in 1..=n {
        acc += &cyc_root(&(b * rat_int(i))).scale(&Rat::from_integer(pow_int(i, l - 1)));
    }
    acc
}

fn inv_factorial(n: i64) -> Rat {
    Rat::new(BigInt::one(), factorial(n as u64))
}

fn eval_q(k: i64, a: &Rat, p: &Partition) -> CycQ {
    let mut acc = beta(k, a);
    if k == 0 {
        return acc;
    }
    let half = rat(1, 2);
    let mut sum = CycQ::zero();
    for i in 1..=p.len() {
        let li = p.shifted(i);
        let x = Rat::from_integer(BigInt::from(li)) + &half;
        let y = Rat::from_integer(BigInt::from(-(i as i64))) + &half;
        let xk = num_traits::pow(x, (k - 1) as usize);
        let yk = num_traits::pow(y, (k - 1) as usize);
        if a.is_integer() {
            sum += &CycQ::from_rat(xk - yk);
        } else {
            sum += &cyc_root(&(a * rat_int(li))).scale(&xk);
            sum -= &cyc_root(&(a * rat_int(-(i as i64)))).scale(&yk);
        }
    }
    acc += &sum.scale(&inv_factorial(k - 1));
    acc
}

fn eval_h(k: i64, a: &Rat, p: &Partition) -> CycQ {
    if a.is_integer() {
        let s: BigInt = p.hooks().iter().map(|&h| pow_int(h as i64, k - 2)).sum();
        return CycQ::from_rat(bernoulli_constant(k as usize) + Rat::from_integer(s));
    }
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let mut acc = CycQ::zero();
    for &h in p.hooks() {
        let h = h as i64;
        let twist = &cyc_root(&(a * rat_int(h))) + &cyc_root(&(a * rat_int(-h))).scale(&rat_int(sign));
        acc += &twist.scale(&Rat::from_integer(pow_int(h, k - 2)));
    }
    &alpha_tilde(k, a) + &acc.scale(&rat(1, 2))
}

fn eval_s(k: i64, a: &Rat, p: &Partition) -> CycQ {
    if a.is_integer() {
        let s: BigInt = p.parts().iter().map(|&x| pow_int(x as i64, k - 1)).sum();
        return CycQ::from_rat(bernoulli_constant(k as usize) + Rat::from_integer(s));
    }
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let mut acc = CycQ::zero();
    for &x in p.parts() {
        let x = x as i64;
        let twist = &cyc_root(&(a * rat_int(x))) + &cyc_root(&(a * rat_int(-x))).scale(&rat_int(sign));
        acc += &twist.scale(&Rat::from_integer(pow_int(x, k - 1)));
    }
    &alpha(k, a) + &acc.scale(&rat(1, 2))
}

fn eval_t(k: i64, l: i64, a: &Rat, b: &Rat, p: &Partition) -> CycQ {
    if a.is_zero() && b.is_zero() {
        let c = if k == 0 || l == 1 { bernoulli_constant((k + l) as usize) } else { Rat::zero() };
        let s: BigInt = p.multiplicities().map(|(m, r)| pow_int(m as i64, k) * seki(r as i64, l)).sum();
        return CycQ::from_rat(c + Rat::from_integer(s));
    }
    let c = if l == 1 {
        alpha(k, a)
    } else if k == 0 {
        alpha(l - 1, b)
    } else {
        CycQ::zero()
    };
    let sign = if (k + l) % 2 == 0 { 1 } else { -1 };
    let mut acc = c;
    for (m, r) in p.multiplicities() {
        let m = m as i64;
        let plus = &cyc_root(&(a * rat_int(m))) * &seki_twisted(r as i64, l, b);
        let minus = &cyc_root(&(a * rat_int(-m))) * &seki_twisted(r as i64, l, &-b);
        let term = &plus + &minus.scale(&rat_int(sign));
        acc += &term.scale(&Rat::from_integer(pow_int(m, k)));
    }
    acc
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shift = |a: &Rat| if a.is_zero() { String::new() } else { format!("; a={}", fmt_rat(a)) };
        match self {
            Family::Q { k, a } => write!(f, "Q({k}{})", shift(a)),
            Family::Qm { k, m } => write!(f, "Qm({k}; {m})"),
            Family::H { k, a } => write!(f, "H({k}{})", shift(a)),
            Family::Ht { k, t } => write!(f, "H({k}; {t})"),
            Family::S { k, a } => write!(f, "S({k}{})", shift(a)),
            Family::St { k, t } => write!(f, "St({k}; {t})"),
            Family::T { k, l, a, b } => {
                if a.is_zero() && b.is_zero() {
                    write!(f, "T({k},{l})")
                } else {
                    write!(f, "T({k},{l}; {},{})", fmt_rat(a), fmt_rat(b))
                }
            }
            Family::Tst { k, l, s, t } => write!(f, "Tst({k},{l}; {s},{t})"),
        }
    }
}

pub type Evaluator = Arc<dyn Fn(&Partition) -> Result<CycQ, FamilyError> + Send + Sync>;

/// A function on partitions with weight and level metadata.
#[derive(Clone)]
pub struct PartitionFunction {
    tag: String,
    weight: i64,
    level: u64,
    eval: Evaluator,
}

impl fmt::Debug for PartitionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartitionFunction({}, weight {}, level {})", self.tag, self.weight, self.level)
    }
}

impl PartitionFunction {
    pub fn new(
        tag: impl Into<String>,
        weight: i64,
        level: u64,
        f: impl Fn(&Partition) -> Result<CycQ, FamilyError> + Send + Sync + 'static,
    ) -> Self {
        PartitionFunction { tag: tag.into(), weight, level, eval: Arc::new(f) }
    }

    pub fn constant(c: CycQ) -> Self {
        let tag = c.to_string();
        PartitionFunction::new(tag, 0, 1, move |_| Ok(c.clone()))
    }

    pub fn one() -> Self {
        Self::constant(CycQ::one())
    }

    pub fn eval(&self, p: &Partition) -> Result<CycQ, FamilyError> {
        (self.eval)(p)
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Pointwise product.
    pub fn product(factors: &[PartitionFunction]) -> PartitionFunction {
        let fs = factors.to_vec();
        let tag = fs.iter().map(|f| f.tag.clone()).collect::<Vec<_>>().join("*");
        let weight = fs.iter().map(|f| f.weight).sum();
        let level = fs.iter().fold(1u64, |l, f| l.lcm(&f.level));
        PartitionFunction::new(if tag.is_empty() { "1".into() } else { tag }, weight, level, move |p| {
            let mut acc = CycQ::one();
            for f in &fs {
                acc *= &f.eval(p)?;
            }
            Ok(acc)
        })
    }

    pub fn mul(&self, other: &PartitionFunction) -> PartitionFunction {
        Self::product(&[self.clone(), other.clone()])
    }

    /// Linear combination Σ c_i f_i (weight taken from the first term).
    pub fn linear_combination(terms: &[(CycQ, PartitionFunction)]) -> PartitionFunction {
        let ts = terms.to_vec();
        let tag = ts.iter().map(|(c, f)| format!("({c})*{}", f.tag)).collect::<Vec<_>>().join(" + ");
        let weight = ts.first().map_or(0, |(_, f)| f.weight);
        let level = ts.iter().fold(1u64, |l, (_, f)| l.lcm(&f.level));
        PartitionFunction::new(tag, weight, level, move |p| {
            let mut acc = CycQ::zero();
            for (c, f) in &ts {
                acc += &(c * &f.eval(p)?);
            }
            Ok(acc)
        })
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::CLaurent;
    use crate::partition::{enumerate_partitions, Partition};

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn spec_examples() {
        assert_eq!(Family::q(2).eval(&p(&[2, 1])).unwrap(), CycQ::from_rat(rat(71, 24)));
        assert_eq!(Family::qa(1, rat(1, 3)).eval(&Partition::empty()).unwrap(), beta(1, &rat(1, 3)));
        assert_eq!(Family::h(2).eval(&p(&[1])).unwrap(), CycQ::from_rat(rat(23, 24)));
        assert_eq!(Family::t(0, 1).eval(&p(&[1, 1])).unwrap(), CycQ::from_rat(rat(9, 4)));
        assert!(matches!(Family::h(1).eval(&p(&[1])), Err(FamilyError::BadParam(_))));
    }

    #[test]
    fn q2_is_size_minus_constant() {
        for lam in enumerate_partitions(8) {
            let expected = rat_int(lam.size() as i64) - rat(1, 24);
            assert_eq!(Family::q(2).eval(&lam).unwrap(), CycQ::from_rat(expected));
        }
    }

    #[test]
    fn q_matches_regularized_generating_series() {
        // Σ_k Q_k w^{k−1} = 1/(e^{w/2}−e^{−w/2}) + Σ_{i≤ℓ} (e^{(λ_i−i+½)w} − e^{(−i+½)w})
        let n = 8usize;
        let half = CycQ::from_rat(rat(1, 2));
        let denom = CLaurent::exp_scaled(&half, n + 2).add(&CLaurent::exp_scaled(&-&half, n + 2).scale(&CycQ::from_int(-1)));
        let base = denom.invert();
        for lam in enumerate_partitions(10) {
            let mut series = base.clone();
            for i in 1..=lam.len() {
                let x = CycQ::from_rat(rat_int(lam.shifted(i)) + rat(1, 2));
                let y = CycQ::from_rat(rat_int(-(i as i64)) + rat(1, 2));
                let diff = CLaurent::exp_scaled(&x, n).add(&CLaurent::exp_scaled(&y, n).scale(&CycQ::from_int(-1)));
                series = series.add(&diff);
            }
            for k in 1..=6i64 {
                assert_eq!(Family::q(k).eval(&lam).unwrap(), series.coeff(k - 1), "k={k} λ={lam}");
            }
        }
    }

    #[test]
    fn shift_is_periodic_mod_one() {
        for lam in enumerate_partitions(6) {
            for k in 0..5 {
                for a in [rat(1, 3), rat(1, 4), rat(5, 6)] {
                    let f1 = Family::qa(k, a.clone()).eval(&lam).unwrap();
                    let f2 = Family::qa(k, a + rat_int(1)).eval(&lam).unwrap();
                    assert_eq!(f1, f2);
                }
            }
        }
    }

    #[test]
    fn twisted_families_reduce_at_zero_shift() {
        for lam in enumerate_partitions(6) {
            for k in 2..6 {
                let direct: Rat = bernoulli_constant(k as usize)
                    + Rat::from_integer(lam.hooks().iter().map(|&h| pow_int(h as i64, k - 2)).sum::<BigInt>());
                assert_eq!(Family::h(k).eval(&lam).unwrap(), CycQ::from_rat(direct));
            }
            let s2 = Family::S { k: 2, a: rat_int(0) }.eval(&lam).unwrap();
            assert_eq!(s2, Family::q(2).eval(&lam).unwrap());
            assert_eq!(Family::Ht { k: 4, t: 1 }.eval(&lam).unwrap(), Family::h(4).eval(&lam).unwrap());
            assert_eq!(Family::St { k: 4, t: 1 }.eval(&lam).unwrap(), Family::s(4).eval(&lam).unwrap());
            assert_eq!(Family::Tst { k: 2, l: 2, s: 1, t: 1 }.eval(&lam).unwrap(), Family::t(2, 2).eval(&lam).unwrap());
        }
    }

    #[test]
    fn q_m_definition() {
        let lam = p(&[3, 1]);
        let m = 3;
        let mut expected = Family::q(2).eval(&lam).unwrap();
        for j in 0..m {
            let v = Family::qa(2, rat(2 * j, m)).eval(&lam).unwrap();
            expected -= &(&cyc_root(&rat(j, m)) * &v).scale(&rat(1, m));
        }
        assert_eq!(Family::Qm { k: 2, m }.eval(&lam).unwrap(), expected);
    }

    #[test]
    fn products_and_metadata() {
        let f = Family::q(2).function().unwrap().mul(&Family::qa(3, rat(1, 2)).function().unwrap());
        assert_eq!(f.weight(), 5);
        assert_eq!(f.level(), 2);
        let lam = p(&[2]);
        let expected = &Family::q(2).eval(&lam).unwrap() * &Family::qa(3, rat(1, 2)).eval(&lam).unwrap();
        assert_eq!(f.eval(&lam).unwrap(), expected);
    }
}
