//! Formal graded algebras behind the q-bracket: polynomials in the symbols
//! Q_k(a) with the operators 𝒟_j, ∂, Δ_n and the projection π, and
//! ⊙-polynomials in T_{k,l} with their derivation δ and projection.
//!
//! Exponents are rational so that expressions like Q₂^{3/2} can be carried;
//! only integral, nonnegative exponents evaluate to partition functions.
//! Q₀(a) is replaced by the constant β₀(a) on construction. Q₁(a) stays a
//! formal variable; [`FormalPoly::to_lambda`] applies Q₁(0) = 0, which holds
//! as functions on partitions.

use crate::bracket::{odot_all, qbracket};
use crate::cyclotomic::CycQ;
use crate::eisenstein::g_series;
use crate::families::{Family, FamilyError, PartitionFunction};
use crate::jet::{Jet, JetError};
use crate::wseries::WSeries;
use crate::npoint::Truncs;
use crate::qj::{bloch_okounkov_recursion, QjError};
use crate::field::{binomial, factorial, fmt_rat, rat, rat_int, falling, rising, Rat};
use crate::qseries::QSeries;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("exponent {0} cannot be evaluated on partitions")]
    NonPolynomial(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Kernel(#[from] QjError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// The symbol Q_k(a), a reduced to [0, 1).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym {
    pub k: u32,
    pub a: Rat,
}

impl Sym {
    pub fn new(k: u32, a: Rat) -> Sym {
        let a = &a - a.floor();
        Sym { k, a }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a.is_zero() {
            write!(f, "Q{}", self.k)
        } else {
            write!(f, "Q{}({})", self.k, fmt_rat(&self.a))
        }
    }
}

type Mono = BTreeMap<Sym, Rat>;

/// β₀(a): 1 at a ∈ ℤ, else 0.
fn beta_zero(a: &Rat) -> Rat {
    if a.is_integer() {
        Rat::one()
    } else {
        Rat::zero()
    }
}

fn mono_weight(m: &Mono) -> Rat {
    m.iter().map(|(s, e)| rat_int(s.k as i64) * e).sum()
}

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut out = a.clone();
    for (s, e) in b {
        let slot = out.entry(s.clone()).or_insert_with(Rat::zero);
        *slot += e;
    }
    out.retain(|_, e| !e.is_zero());
    out
}

/// A polynomial (with rational exponents) in the symbols Q_k(a), k ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FormalPoly {
    terms: BTreeMap<Mono, Rat>,
}

impl FormalPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::new(), c);
        }
        FormalPoly { terms }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    /// Q_k(a); Q₀(a) is the constant β₀(a).
    pub fn q(k: u32, a: Rat) -> Self {
        Self::q_pow(k, a, rat_int(1))
    }

    /// Q_k(a)^e.
    pub fn q_pow(k: u32, a: Rat, e: Rat) -> Self {
        if k == 0 {
            let b = beta_zero(&a);
            return if e.is_zero() { Self::one() } else if b.is_zero() { Self::zero() } else { Self::one() };
        }
        let mut m = Mono::new();
        if !e.is_zero() {
            m.insert(Sym::new(k, a), e);
        }
        FormalPoly { terms: BTreeMap::from([(m, Rat::one())]) }
    }

    /// Q_k at a = 0.
    pub fn q0(k: u32) -> Self {
        Self::q(k, Rat::zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BTreeMap<Sym, Rat>, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &FormalPoly) -> FormalPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FormalPoly) -> FormalPoly {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> FormalPoly {
        if c.is_zero() {
            return Self::zero();
        }
        FormalPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul(&self, other: &FormalPoly) -> FormalPoly {
        let mut out = FormalPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert(mono_mul(m1, m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> FormalPoly {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// The common weight, or an error for inhomogeneous elements (zero has weight 0).
    pub fn weight(&self) -> Result<Rat, StructureError> {
        let mut ws = self.terms.keys().map(mono_weight);
        let Some(w) = ws.next() else {
            return Ok(Rat::zero());
        };
        if ws.all(|x| x == w) {
            Ok(w)
        } else {
            Err(StructureError::NotHomogeneous)
        }
    }

    /// Smallest N with every shift a in (1/N)ℤ.
    pub fn level(&self) -> u64 {
        self.terms
            .keys()
            .flat_map(|m| m.keys())
            .fold(1u64, |acc, s| acc.lcm(&s.a.denom().try_into().unwrap_or(1)))
    }

    /// ∂/∂Q_k(a).
    pub fn partial(&self, s: &Sym) -> FormalPoly {
        let mut out = FormalPoly::zero();
        for (m, c) in &self.terms {
            let Some(e) = m.get(s) else {
                continue;
            };
            let mut m2 = m.clone();
            let e2 = e - Rat::one();
            if e2.is_zero() {
                m2.remove(s);
            } else {
                m2.insert(s.clone(), e2);
            }
            out.insert(m2, c * e);
        }
        out
    }

    fn symbols(&self) -> Vec<Sym> {
        let mut v: Vec<Sym> = self.terms.keys().flat_map(|m| m.keys().cloned()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// The j-th order operator 𝒟_j = Σ multinomial(|i|; i) Q_{|i|}(|a|) ∂_{i}(a).
    pub fn d_op(&self, j: u32) -> FormalPoly {
        if j == 0 {
            return self.clone();
        }
        let syms = self.symbols();
        let mut out = FormalPoly::zero();
        // ordered j-tuples of symbols, derivative taken step by step
        fn rec(f: &FormalPoly, syms: &[Sym], left: u32, chosen: &mut Vec<Sym>, out: &mut FormalPoly) {
            if f.is_zero() {
                return;
            }
            if left == 0 {
                let is: Vec<u64> = chosen.iter().map(|s| s.k as u64 - 1).collect();
                let total: u64 = is.iter().sum();
                let mult = is.iter().fold(factorial(total), |acc, &i| acc / factorial(i));
                let a: Rat = chosen.iter().map(|s| s.a.clone()).sum();
                let lead = FormalPoly::q(total as u32, a).scale(&Rat::from_integer(mult));
                *out = out.add(&lead.mul(f));
                return;
            }
            for s in syms {
                chosen.push(s.clone());
                rec(&f.partial(s), syms, left - 1, chosen, out);
                chosen.pop();
            }
        }
        rec(self, &syms, j, &mut Vec::new(), &mut out);
        out
    }

    /// ∂ = 𝒟₁.
    pub fn del(&self) -> FormalPoly {
        self.d_op(1)
    }

    fn del_pow(&self, n: u32) -> FormalPoly {
        (0..n).fold(self.clone(), |acc, _| acc.del())
    }

    /// Δ_n = Σ_i (−1)^i C(n, i) ∂^i 𝒟_{n−i}.
    pub fn delta_n(&self, n: u32) -> FormalPoly {
        let mut out = FormalPoly::zero();
        for i in 0..=n {
            let c = Rat::from_integer(binomial(n as i64, i as i64));
            let c = if i % 2 == 0 { c } else { -c };
            out = out.add(&self.d_op(n - i).del_pow(i).scale(&c));
        }
        out
    }

    /// f^∨(g): the algebra map Q_n ↦ Δ_n applied to g (level 1, integral exponents).
    pub fn vee_apply(&self, g: &FormalPoly) -> Result<FormalPoly, StructureError> {
        self.vee_with(g, |_| Rat::one())
    }

    /// As [`Self::vee_apply`] with Q_n ↦ Δ_n / n!.
    pub fn vee_apply_divided(&self, g: &FormalPoly) -> Result<FormalPoly, StructureError> {
        self.vee_with(g, |n| Rat::new(BigInt::one(), factorial(n as u64)))
    }

    fn vee_with(&self, g: &FormalPoly, norm: impl Fn(u32) -> Rat) -> Result<FormalPoly, StructureError> {
        let mut out = FormalPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = g.clone();
            let mut c = c.clone();
            for (s, e) in m {
                let e = integral_exponent(e)?;
                if !s.a.is_zero() {
                    return Err(StructureError::NonPolynomial(format!("∨ on the level-N symbol {s}")));
                }
                for _ in 0..e {
                    acc = acc.delta_n(s.k);
                    c *= norm(s.k);
                }
            }
            out = out.add(&acc.scale(&c));
        }
        Ok(out)
    }

    /// Q₁(0) = 0, the relation of the canonical map to functions on partitions.
    pub fn to_lambda(&self) -> FormalPoly {
        let q1 = Sym::new(1, Rat::zero());
        let mut out = FormalPoly::zero();
        for (m, c) in &self.terms {
            if !m.contains_key(&q1) {
                out.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// The correction operator π on a homogeneous element.
    pub fn pi(&self) -> Result<FormalPoly, StructureError> {
        let l = self.weight()?;
        let q2 = FormalPoly::q0(2);
        let mut out = FormalPoly::zero();
        let mut r = 0u32;
        while rat_int(2 * r as i64) <= l {
            let poch = rising(&(&l - rat_int(r as i64) - rat(3, 2)), r as u64);
            let lead = &poch * Rat::from_integer(BigInt::from(2).pow(r));
            for s in 0..=r {
                let term = self.d_op_pow(2, s).del_pow(2 * (r - s));
                if term.is_zero() {
                    continue;
                }
                let denom = &lead * Rat::from_integer(factorial((r - s) as u64) * factorial(s as u64));
                let sign = if s % 2 == 0 { Rat::one() } else { -Rat::one() };
                out = out.add(&q2.pow(r).mul(&term).scale(&(sign / denom)));
            }
            r += 1;
        }
        Ok(out)
    }

    fn d_op_pow(&self, j: u32, n: u32) -> FormalPoly {
        (0..n).fold(self.clone(), |acc, _| acc.d_op(j))
    }

    /// ℳ for an index with every entry equal to `m`: each monomial, read as
    /// a list of factors, is lowered at an ordered pair of positions (i = j allowed).
    pub fn m_op(&self, m: &Rat) -> Result<FormalPoly, StructureError> {
        let mut out = FormalPoly::zero();
        for (mono, c) in &self.terms {
            let mut factors = Vec::new();
            for (s, e) in mono {
                for _ in 0..integral_exponent(e)? {
                    factors.push(s.clone());
                }
            }
            for i in 0..factors.len() {
                for j in 0..factors.len() {
                    let mut lowered = factors.clone();
                    let mut ok = true;
                    for p in [i, j] {
                        if lowered[p].k == 0 {
                            ok = false;
                            break;
                        }
                        lowered[p].k -= 1;
                    }
                    if !ok {
                        continue;
                    }
                    let term = lowered.iter().fold(FormalPoly::one(), |acc, s| acc.mul(&FormalPoly::q(s.k, s.a.clone())));
                    out = out.add(&term.scale(&(c * m)));
                }
            }
        }
        Ok(out)
    }

    /// The general template Σ (−1)^r Q₂^r ℳ^{r−s} 𝒟^s f / ((ℓ−r−3/2)_r (r−s)! s!)
    /// with the given ℳ-index entry and 𝒟 = 𝒟₂/2.
    pub fn pi_template(&self, m: &Rat) -> Result<FormalPoly, StructureError> {
        let l = self.weight()?;
        let q2 = FormalPoly::q0(2);
        let mut out = FormalPoly::zero();
        let mut r = 0u32;
        while rat_int(2 * r as i64) <= l {
            let poch = rising(&(&l - rat_int(r as i64) - rat(3, 2)), r as u64);
            for s in 0..=r {
                let mut term = (0..s).fold(self.clone(), |acc, _| acc.d_op(2).scale(&rat(1, 2)));
                for _ in 0..r - s {
                    term = term.m_op(m)?;
                }
                if term.is_zero() {
                    continue;
                }
                let denom = &poch * Rat::from_integer(factorial((r - s) as u64) * factorial(s as u64));
                let sign = if r.is_multiple_of(2) { Rat::one() } else { -Rat::one() };
                out = out.add(&q2.pow(r).mul(&term).scale(&(sign / denom)));
            }
            r += 1;
        }
        Ok(out)
    }

    /// π through the ∨ map: Q₂^{ℓ−3/2} f^∨(Q₂^{3/2}) / (3/2)^−_ℓ with Q_n ↦ Δ_n/n!.
    ///
    /// With the undivided map and an ℓ! in the denominator the two agree on
    /// single generators only; on Q_λ they differ by the multinomial ℓ!/Πλ_i!.
    pub fn pi_via_vee(&self) -> Result<FormalPoly, StructureError> {
        let l = self.weight()?;
        let li = integral_exponent(&l)?;
        let seed = FormalPoly::q_pow(2, Rat::zero(), rat(3, 2));
        let image = self.vee_apply_divided(&seed)?;
        let front = FormalPoly::q_pow(2, Rat::zero(), &l - rat(3, 2));
        Ok(front.mul(&image).scale(&(Rat::one() / falling(&rat(3, 2), li as u64))))
    }

    /// The undivided form Q₂^{ℓ−3/2} f^∨(Q₂^{3/2}) / ((3/2)^−_ℓ ℓ!).
    pub fn pi_via_vee_undivided(&self) -> Result<FormalPoly, StructureError> {
        let l = self.weight()?;
        let li = integral_exponent(&l)?;
        let seed = FormalPoly::q_pow(2, Rat::zero(), rat(3, 2));
        let image = self.vee_apply(&seed)?;
        let front = FormalPoly::q_pow(2, Rat::zero(), &l - rat(3, 2));
        let denom = falling(&rat(3, 2), li as u64) * Rat::from_integer(factorial(li as u64));
        Ok(front.mul(&image).scale(&(Rat::one() / denom)))
    }

    /// Divisible by Q₂ = Q₂(0) in every monomial.
    pub fn divisible_by_q2(&self) -> bool {
        let q2 = Sym::new(2, Rat::zero());
        self.terms.keys().all(|m| m.get(&q2).is_some_and(|e| e >= &Rat::one()))
    }

    /// Exact division by Q₂, if divisible.
    pub fn div_q2(&self) -> Option<FormalPoly> {
        if !self.divisible_by_q2() {
            return None;
        }
        Some(self.mul(&FormalPoly::q_pow(2, Rat::zero(), rat_int(-1))))
    }

    /// The monomials free of Q₂, a complement of Q₂·𝓕.
    pub fn q2_free_part(&self) -> FormalPoly {
        let q2 = Sym::new(2, Rat::zero());
        let mut out = FormalPoly::zero();
        for (m, c) in &self.terms {
            if !m.contains_key(&q2) {
                out.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// f = Σ g_i Q₂^i with g_i = π(f_i), f₀ = f, f_{i+1} = (f_i − π f_i)/Q₂, all in Λ*.
    pub fn split(&self) -> Result<Vec<FormalPoly>, StructureError> {
        let mut parts = Vec::new();
        let mut f = self.to_lambda();
        while !f.is_zero() {
            let g = f.pi()?.to_lambda();
            let rest = f.sub(&g);
            parts.push(g);
            f = rest.div_q2().ok_or(StructureError::NotHomogeneous)?;
        }
        Ok(parts)
    }

    /// The partition function (exponents must be nonnegative integers).
    pub fn to_function(&self) -> Result<PartitionFunction, StructureError> {
        let mut combo = Vec::new();
        for (m, c) in &self.terms {
            let mut factors = Vec::new();
            for (s, e) in m {
                let e = integral_exponent(e)?;
                for _ in 0..e {
                    factors.push(Family::qa(s.k as i64, s.a.clone()).function()?);
                }
            }
            combo.push((CycQ::from_rat(c.clone()), PartitionFunction::product(&factors)));
        }
        Ok(PartitionFunction::linear_combination(&combo).with_tag(self.to_string()))
    }

    /// ⟨f⟩_q to O(q^(t+1)).
    pub fn bracket(&self, t: u32) -> Result<QSeries, StructureError> {
        if self.is_zero() {
            return Ok(QSeries::big_o(rat_int(t as i64 + 1)));
        }
        Ok(qbracket(&self.to_function()?, t)?)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let syms: Vec<Value> = m.iter().map(|(s, e)| json!([s.k, fmt_rat(&s.a), fmt_rat(e)])).collect();
                json!([fmt_rat(c), syms])
            })
            .collect();
        Value::Array(terms)
    }
}

fn integral_exponent(e: &Rat) -> Result<u32, StructureError> {
    if !e.is_integer() || e.is_negative() {
        return Err(StructureError::NonPolynomial(fmt_rat(e)));
    }
    e.to_integer().try_into().map_err(|_| StructureError::NonPolynomial(fmt_rat(e)))
}

impl fmt::Display for FormalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let body: Vec<String> = m
                    .iter()
                    .map(|(s, e)| if e.is_one() { s.to_string() } else { format!("{s}^{}", fmt_rat(e)) })
                    .collect();
                if body.is_empty() {
                    fmt_rat(c)
                } else {
                    format!("{}*{}", fmt_rat(c), body.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Compares ⟨𝒟_j W(z₁)⋯W(z_n)⟩_q with j!(z₁δ_{z₁}^{j−1} + ⋯ + z_nδ_{z_n}^{j−1})F_n
/// coefficientwise on the box of exponents [−1, t.j)^n. Returns the exponents
/// checked and whether all agreed.
pub fn bracket_law(j: u32, n: usize, t: Truncs) -> Result<(usize, bool), StructureError> {
    let f = bloch_okounkov_recursion(n, t.q as i64 + 1, t.j + 1)?;
    let jf = Rat::from_integer(factorial(j as u64));
    let mut sum: Option<Jet> = None;
    for i in 0..n {
        let g = (1..j).fold(f.clone(), |acc, _| acc.delta_z(i));
        let base = g.base();
        let zi = WSeries::monomial(1, QSeries::constant(CycQ::from_int(1)), t.j + 4);
        let term = base.mul(&Jet::univariate(n, base.shape(), i, &zi)).scale_rat(&jf);
        sum = Some(match sum {
            None => term,
            Some(acc) => acc.add(&term),
        });
    }
    let rhs = sum.expect("n ≥ 1").to_box(&vec![1; n], &vec![t.j; n])?;
    let mut exps = vec![vec![]];
    for _ in 0..n {
        exps = exps.into_iter().flat_map(|e: Vec<i64>| (-1..t.j).map(move |x| [e.clone(), vec![x]].concat())).collect();
    }
    let mut all = true;
    for e in &exps {
        let mono = e.iter().fold(FormalPoly::one(), |acc, x| acc.mul(&FormalPoly::q0((x + 1) as u32)));
        let lhs = mono.d_op(j).bracket(t.q)?;
        let r = rhs.coeff(e)?;
        all &= r.trunc().is_none_or(|x| x >= &rat_int(t.q as i64 + 1)) && lhs.eq_common(&r);
    }
    Ok((exps.len(), all))
}

/// ϑ = D − 𝕖₂W on a series of the given weight, i.e. D + 2k𝔾₂.
pub fn serre_series(s: &QSeries, weight: i64, t: i64) -> QSeries {
    s.d_tau().add(&g_series(2, t).mul(s).scale_rat(&rat_int(2 * weight)))
}

/// ϑ^{k−1}𝔾_{l−k+2} (l ≥ k) or ϑ^l𝔾_{k−l} (k ≥ l + 2), with ϑ = D − 𝕖₂W throughout,
/// known through q^t.
pub fn t_projection_stated(k: u32, l: u32, t: i64) -> Option<QSeries> {
    let (start, steps) = if l >= k { (l + 2 - k, k - 1) } else if k >= l + 2 { (k - l, l) } else { return None };
    let mut s = g_series(start, t + 1);
    for i in 0..steps {
        s = serre_series(&s, (start + 2 * i) as i64, t + 1);
    }
    Some(s)
}

/// The same cases with k and l exchanged, the first ϑ-step on 𝔾₂ being
/// D𝔾₂ + 2𝔾₂² = (5/6)𝔾₄. This is what ⟨π(T_{k,l})⟩_q equals.
pub fn t_projection_law(k: u32, l: u32, t: i64) -> Option<QSeries> {
    let (start, steps) = if k >= l { (k + 2 - l, l - 1) } else if l >= k + 2 { (l - k, k) } else { return None };
    let mut s = g_series(start, t + 1);
    for i in 0..steps {
        let w = start + 2 * i;
        s = serre_series(&s, if w == 2 { 1 } else { w as i64 }, t + 1);
    }
    Some(s)
}

/// h_k = Σ_r Q₂^r Q_{k−2r} / (2^r (k−r−3/2)_r r!).
pub fn h_k(k: u32) -> FormalPoly {
    let mut out = FormalPoly::zero();
    for r in 0..=k / 2 {
        let denom = Rat::from_integer(BigInt::from(2).pow(r) * factorial(r as u64)) * rising(&(rat_int((k - r) as i64) - rat(3, 2)), r as u64);
        out = out.add(&FormalPoly::q0(2).pow(r).mul(&FormalPoly::q0(k - 2 * r)).scale(&(Rat::one() / denom)));
    }
    out
}

/// A ⊙-polynomial in the symbols T_{k,l}.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TPoly {
    terms: BTreeMap<BTreeMap<(u32, u32), u32>, Rat>,
}

impl TPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut t = Self::zero();
        t.insert(BTreeMap::new(), c);
        t
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn t(k: u32, l: u32) -> Self {
        let mut t = Self::zero();
        t.insert(BTreeMap::from([((k, l), 1)]), Rat::one());
        t
    }

    fn insert(&mut self, m: BTreeMap<(u32, u32), u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BTreeMap<(u32, u32), u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &TPoly) -> TPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> TPoly {
        let mut out = TPoly::zero();
        for (m, x) in &self.terms {
            out.insert(m.clone(), x * c);
        }
        out
    }

    /// The induced product ⊙.
    pub fn odot(&self, other: &TPoly) -> TPoly {
        let mut out = TPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                for (s, e) in m2 {
                    *m.entry(*s).or_insert(0) += e;
                }
                out.insert(m, c1 * c2);
            }
        }
        out
    }

    pub fn odot_pow(&self, n: u32) -> TPoly {
        (0..n).fold(Self::one(), |acc, _| acc.odot(self))
    }

    /// Weight under wt T_{k,l} = k + l, or an error for inhomogeneous input.
    pub fn weight(&self) -> Result<u32, StructureError> {
        let mut ws = self.terms.keys().map(|m| m.iter().map(|((k, l), e)| (k + l) * e).sum::<u32>());
        let Some(w) = ws.next() else {
            return Ok(0);
        };
        if ws.all(|x| x == w) {
            Ok(w)
        } else {
            Err(StructureError::NotHomogeneous)
        }
    }

    /// δ on one generator.
    fn delta_gen(k: u32, l: u32) -> TPoly {
        if k >= 1 && l >= 2 {
            TPoly::t(k - 1, l - 1).scale(&rat_int((k * (l - 1)) as i64))
        } else if k + l == 2 {
            TPoly::constant(rat(-1, 2))
        } else {
            TPoly::zero()
        }
    }

    /// The ⊙-derivation δ.
    pub fn delta(&self) -> TPoly {
        let mut out = TPoly::zero();
        for (m, c) in &self.terms {
            for (&(k, l), &e) in m {
                let mut rest = m.clone();
                if e == 1 {
                    rest.remove(&(k, l));
                } else {
                    rest.insert((k, l), e - 1);
                }
                let mut restp = TPoly::zero();
                restp.insert(rest, c * rat_int(e as i64));
                out = out.add(&restp.odot(&Self::delta_gen(k, l)));
            }
        }
        out
    }

    /// π(f) = Σ_r 2^r/r! T_{1,1}^{⊙r} ⊙ δ^r f.
    pub fn pi(&self) -> TPoly {
        let mut out = TPoly::zero();
        let mut d = self.clone();
        let mut r = 0u32;
        while !d.is_zero() {
            let c = Rat::new(BigInt::from(2).pow(r), factorial(r as u64));
            out = out.add(&TPoly::t(1, 1).odot_pow(r).odot(&d).scale(&c));
            d = d.delta();
            r += 1;
        }
        out
    }

    /// ⟨f⟩_q to O(q^(n+1)), with ⊙ realized on partitions of size ≤ n.
    pub fn bracket(&self, n: u32) -> Result<QSeries, StructureError> {
        let terms: Vec<(&BTreeMap<(u32, u32), u32>, &Rat)> = self.terms.iter().collect();
        let parts: Vec<QSeries> = terms
            .par_iter()
            .map(|(m, c)| {
                let mut factors = Vec::new();
                for (&(k, l), &e) in m.iter() {
                    for _ in 0..e {
                        factors.push(Family::t(k as i64, l as i64).function()?);
                    }
                }
                let f = odot_all(&factors, n)?;
                Ok(qbracket(&f, n)?.scale_rat(c))
            })
            .collect::<Result<_, StructureError>>()?;
        Ok(parts.into_iter().fold(QSeries::big_o(rat_int(n as i64 + 1)), |acc, s| acc.add(&s)))
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| json!([fmt_rat(c), m.iter().map(|((k, l), e)| json!([k, l, e])).collect::<Vec<_>>()]))
            .collect();
        Value::Array(terms)
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let body: Vec<String> = m
                    .iter()
                    .map(|((k, l), e)| if *e == 1 { format!("T({k},{l})") } else { format!("T({k},{l})^⊙{e}") })
                    .collect();
                if body.is_empty() {
                    fmt_rat(c)
                } else {
                    format!("{}*{}", fmt_rat(c), body.join("⊙"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasimodular::{certify, DEFAULT_MARGIN};

    fn q(k: u32) -> FormalPoly {
        FormalPoly::q0(k)
    }

    #[test]
    fn first_and_second_order_operators() {
        for k in 2..7 {
            assert_eq!(q(k).d_op(1), q(k - 1));
        }
        let a = rat(1, 3);
        assert_eq!(FormalPoly::q(4, a.clone()).del(), FormalPoly::q(3, a));
        for (x, y) in [(3u32, 4u32), (2, 5), (3, 3)] {
            let expect = q(x + y - 2).scale(&Rat::from_integer(binomial((x + y - 2) as i64, (x - 1) as i64) * 2));
            assert_eq!(q(x).mul(&q(y)).d_op(2), expect, "({x},{y})");
        }
    }

    #[test]
    fn projection_examples() {
        assert!(q(2).pi().unwrap().is_zero());
        assert_eq!(q(4).pi().unwrap().to_lambda(), q(4).add(&q(2).pow(2).scale(&rat(1, 2))));
        assert_eq!(FormalPoly::one().pi().unwrap(), FormalPoly::one());
        assert!(h_k(2).to_lambda().is_zero());
        for k in 0..=8 {
            assert_eq!(h_k(k).to_lambda(), q(k).pi().unwrap().to_lambda(), "h_{k}");
        }
    }

    fn sample() -> Vec<FormalPoly> {
        vec![q(3), q(4), q(6), q(3).mul(&q(3)), q(5).mul(&q(3)), q(4).mul(&q(2)), q(3).mul(&q(3)).mul(&q(2)), q(5).add(&q(3).mul(&q(2)))]
    }

    #[test]
    fn projection_is_idempotent_and_kills_q2_multiples() {
        for f in sample() {
            let p = f.pi().unwrap().to_lambda();
            assert_eq!(p.pi().unwrap().to_lambda(), p, "{f}");
            assert!(q(2).mul(&f).pi().unwrap().to_lambda().is_zero(), "Q2*({f})");
            assert!(f.to_lambda().sub(&p).divisible_by_q2() || f.to_lambda() == p, "{f}");
        }
    }

    /// All monomials of weight w in Q_2, Q_3, ...
    fn monomials(w: u32, min: u32) -> Vec<FormalPoly> {
        if w == 0 {
            return vec![FormalPoly::one()];
        }
        (min.max(2)..=w).flat_map(|k| monomials(w - k, k).into_iter().map(move |m| m.mul(&q(k)))).collect()
    }

    #[test]
    fn divided_vee_reproduces_projection_through_weight_eight() {
        for w in 0..=8 {
            for f in monomials(w, 2) {
                assert_eq!(f.pi_via_vee().unwrap().to_lambda(), f.pi().unwrap().to_lambda(), "{f}");
            }
        }
    }

    #[test]
    fn undivided_vee_is_off_by_a_multinomial() {
        for k in 2..=6 {
            assert_eq!(q(k).pi_via_vee_undivided().unwrap().to_lambda(), q(k).pi().unwrap().to_lambda());
        }
        let f = q(3).mul(&q(3));
        let p = f.pi().unwrap().to_lambda();
        assert_eq!(f.pi_via_vee_undivided().unwrap().to_lambda().scale(&rat_int(20)), p);
    }

    #[test]
    fn index_operator_matches_second_derivative() {
        for f in sample() {
            let a = f.m_op(&rat(-1, 2)).unwrap();
            assert_eq!(a, f.del().del().scale(&rat(-1, 2)), "{f}");
            assert_eq!(f.pi_template(&rat(-1, 2)).unwrap(), f.pi().unwrap(), "{f}");
        }
    }

    #[test]
    fn operator_bracket_law() {
        for n in 1..=2 {
            for j in 1..=2 {
                let (count, ok) = bracket_law(j, n, Truncs { q: 5, j: 3 }).unwrap_or_else(|e| panic!("j={j} n={n}: {e}"));
                assert!(ok && count > 0, "j={j} n={n}");
            }
        }
    }

    #[test]
    fn delta_operators_commute() {
        let g = q(3).mul(&q(4)).add(&q(2).mul(&q(5)));
        for (m, n) in [(2, 3), (1, 4), (2, 2), (3, 4)] {
            assert_eq!(g.delta_n(m).delta_n(n), g.delta_n(n).delta_n(m), "Δ{m} Δ{n}");
        }
        assert!(q(3).delta_n(1).is_zero());
    }

    #[test]
    fn splitting_reconstructs() {
        for f in sample() {
            let parts = f.split().unwrap();
            let mut back = FormalPoly::zero();
            for (i, g) in parts.iter().enumerate() {
                assert_eq!(g.pi().unwrap().to_lambda(), *g);
                back = back.add(&g.mul(&q(2).pow(i as u32)));
            }
            assert_eq!(back, f.to_lambda(), "{f}");
        }
    }

    #[test]
    fn projected_brackets_are_modular() {
        for f in [q(4), q(6), q(3).mul(&q(3)), q(5).mul(&q(3))] {
            let w = f.weight().unwrap().to_integer().try_into().unwrap();
            let s = f.pi().unwrap().to_lambda().bracket(18).unwrap();
            assert!(certify(&s, w, 1, 0, DEFAULT_MARGIN).unwrap().is_certified(), "{f}");
        }
    }

    #[test]
    fn t_derivation_table() {
        assert_eq!(TPoly::t(1, 1).delta(), TPoly::constant(rat(-1, 2)));
        assert_eq!(TPoly::t(2, 2).delta(), TPoly::t(1, 1).scale(&rat_int(2)));
        assert!(TPoly::t(1, 1).pi().is_zero());
        let f = TPoly::t(2, 2).odot(&TPoly::t(1, 3));
        let d = f.delta();
        let manual = TPoly::t(2, 2).delta().odot(&TPoly::t(1, 3)).add(&TPoly::t(2, 2).odot(&TPoly::t(1, 3).delta()));
        assert_eq!(d, manual);
    }

    #[test]
    fn t_projection_is_multiplicative() {
        let gens = [(1, 1), (2, 2), (1, 3), (3, 1), (2, 4), (3, 3), (1, 5), (0, 2)];
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i..] {
                let f = TPoly::t(a.0, a.1);
                let g = TPoly::t(b.0, b.1);
                assert_eq!(f.odot(&g).pi(), f.pi().odot(&g.pi()), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn t_projection_brackets_follow_the_transposed_law() {
        for (k, l) in [(1, 3), (2, 2), (3, 1), (0, 4), (1, 5), (2, 4), (3, 3), (4, 2), (5, 1)] {
            let b = TPoly::t(k, l).pi().bracket(8).unwrap();
            assert!(b.eq_common(&t_projection_law(k, l, 8).unwrap()), "({k},{l})");
        }
        let b = TPoly::t(1, 3).pi().bracket(8).unwrap();
        assert!(!b.eq_common(&t_projection_stated(1, 3, 8).unwrap()));
    }

    #[test]
    fn t_bracket_of_projection() {
        let s = TPoly::t(1, 1).pi().bracket(6).unwrap();
        assert!(s.truncate_int(7).is_zero());
        let s = TPoly::t(1, 3).pi().bracket(16).unwrap();
        assert!(certify(&s, 4, 1, 0, DEFAULT_MARGIN).unwrap().is_certified());
    }
}
