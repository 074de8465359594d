//! Multivariate Laurent jets in w_1, ..., w_n with q-series coefficients.
//!
//! A jet knows its coefficients on a region {e : f_t(e) < hi_t for all t},
//! where the linear functionals f_t depend on the shape:
//! - `Box`: f_t(e) = e_t, an ordinary per-variable truncation;
//! - `Chamber`: f_t(e) = e_t + e_{t+1} + ⋯ + e_n, the iterated Laurent
//!   expansion in the chamber |w_1| ≫ |w_2| ≫ ⋯ ≫ |w_n|.
//!
//! Each jet also carries lower bounds lo_t ≤ f_t(e) valid for every term of
//! the full (untruncated) series, which is what makes products well defined.

use crate::cyclotomic::CycQ;
use crate::field::{factorial, rat_int, Rat};
use crate::qseries::QSeries;
use crate::wseries::WSeries;
use num_bigint::BigInt;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use thiserror::Error;

/// Stand-in for an unbounded region.
pub const INF: i64 = i64::MAX / 4;

fn add_bound(a: i64, b: i64) -> i64 {
    if a >= INF || b >= INF {
        INF
    } else {
        (a + b).min(INF)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("jet order exceeded: {0}")]
    JetOrderExceeded(String),
    #[error("poles are not orthogonal: nonzero coefficient at exponent {0:?}")]
    NonOrthogonalPoles(Vec<i64>),
    #[error("shape or rank mismatch")]
    Mismatch,
    #[error("malformed jet JSON: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Box,
    Chamber,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    rank: usize,
    shape: Shape,
    lo: Vec<i64>,
    hi: Vec<i64>,
    terms: BTreeMap<Vec<i64>, QSeries>,
}

/// All vectors over `idx` with nonnegative entries summing to k.
fn compositions(idx: &[usize], k: i64, rank: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; rank];
    fn rec(idx: &[usize], pos: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if pos + 1 == idx.len() {
            cur[idx[pos]] = left;
            out.push(cur.clone());
            cur[idx[pos]] = 0;
            return;
        }
        for a in 0..=left {
            cur[idx[pos]] = a;
            rec(idx, pos + 1, left - a, cur, out);
        }
        cur[idx[pos]] = 0;
    }
    if idx.is_empty() {
        if k == 0 {
            out.push(cur);
        }
        return out;
    }
    rec(idx, 0, k, &mut cur, &mut out);
    out
}

/// |α|!/α! over the entries of α.
fn multinomial(alpha: &[i64]) -> BigInt {
    let total: i64 = alpha.iter().sum();
    alpha.iter().fold(factorial(total as u64), |acc, &a| acc / factorial(a as u64))
}

impl Jet {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &QSeries)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Functional values f_t(e).
    pub fn functionals(shape: Shape, e: &[i64]) -> Vec<i64> {
        match shape {
            Shape::Box => e.to_vec(),
            Shape::Chamber => {
                let mut out = vec![0; e.len()];
                let mut acc = 0;
                for t in (0..e.len()).rev() {
                    acc += e[t];
                    out[t] = acc;
                }
                out
            }
        }
    }

    /// Whether e lies in the known region.
    pub fn knows(&self, e: &[i64]) -> bool {
        Self::functionals(self.shape, e).iter().zip(&self.hi).all(|(v, h)| v < h)
    }

    fn build(rank: usize, shape: Shape, lo: Vec<i64>, hi: Vec<i64>, terms: impl IntoIterator<Item = (Vec<i64>, QSeries)>) -> Jet {
        let mut map: BTreeMap<Vec<i64>, QSeries> = BTreeMap::new();
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            let f = Self::functionals(shape, &e);
            if f.iter().zip(&hi).any(|(v, h)| v >= h) {
                continue;
            }
            match map.remove(&e) {
                Some(prev) => {
                    let s = prev.add(&c);
                    if !s.is_zero() {
                        map.insert(e, s);
                    }
                }
                None => {
                    map.insert(e, c);
                }
            }
        }
        Jet { rank, shape, lo, hi, terms: map }
    }

    /// The constant jet c, known everywhere.
    pub fn constant(rank: usize, shape: Shape, c: QSeries) -> Jet {
        Self::build(rank, shape, vec![0; rank], vec![INF; rank], [(vec![0; rank], c)])
    }

    pub fn zero(rank: usize, shape: Shape) -> Jet {
        Self::constant(rank, shape, QSeries::zero())
    }

    pub fn one(rank: usize, shape: Shape) -> Jet {
        Self::constant(rank, shape, QSeries::one())
    }

    /// A jet from explicit terms and region, with lower bounds taken from the terms.
    pub fn from_terms(rank: usize, shape: Shape, hi: Vec<i64>, terms: impl IntoIterator<Item = (Vec<i64>, QSeries)>) -> Jet {
        let terms: Vec<(Vec<i64>, QSeries)> = terms.into_iter().collect();
        let mut lo = vec![INF; rank];
        for (e, _) in &terms {
            for (l, v) in lo.iter_mut().zip(Self::functionals(shape, e)) {
                *l = (*l).min(v);
            }
        }
        for l in lo.iter_mut() {
            if *l == INF {
                *l = 0;
            }
        }
        Self::build(rank, shape, lo, hi, terms)
    }

    /// P(Σ_{i∈vars} w_i) for a univariate Laurent series P, restricted to the target region.
    ///
    /// In a box only single-variable poles are representable. In a chamber a
    /// negative power of the sum is expanded around its first variable.
    pub fn substitute(rank: usize, shape: Shape, vars: &[usize], p: &WSeries, target: &[i64]) -> Result<Jet, JetError> {
        let mut vars = vars.to_vec();
        vars.sort_unstable();
        vars.dedup();
        assert!(!vars.is_empty() && vars.iter().all(|&i| i < rank));
        let lead = vars[0];
        let rest: Vec<usize> = vars[1..].to_vec();
        let mut hi = target.to_vec();
        let mut lo = vec![0i64; rank];
        let mut terms: Vec<(Vec<i64>, QSeries)> = Vec::new();
        match shape {
            Shape::Box => {
                if vars.len() == 1 {
                    hi[lead] = hi[lead].min(p.trunc());
                    lo[lead] = p.val();
                    for (k, c) in p.terms() {
                        let mut e = vec![0; rank];
                        e[lead] = k;
                        terms.push((e, c.clone()));
                    }
                    for (i, h) in hi.iter_mut().enumerate() {
                        if i != lead {
                            *h = INF;
                        }
                    }
                    return Ok(Self::build(rank, shape, lo, hi, terms));
                }
                if p.terms().any(|(k, _)| k < 0) {
                    return Err(JetError::NonOrthogonalPoles(vars.iter().map(|&i| i as i64).collect()));
                }
                let max_deg: i64 = vars.iter().map(|&i| hi[i] - 1).sum();
                if max_deg >= p.trunc() {
                    return Err(JetError::JetOrderExceeded(format!(
                        "substituting a sum needs w-order {} but the series is known below {}",
                        max_deg + 1,
                        p.trunc()
                    )));
                }
                for (i, h) in hi.iter_mut().enumerate() {
                    if !vars.contains(&i) {
                        *h = INF;
                    }
                }
                for k in p.val().max(0)..=max_deg {
                    let c = p.coeff(k);
                    if c.is_zero() {
                        continue;
                    }
                    for alpha in compositions(&vars, k, rank) {
                        if alpha.iter().zip(&hi).any(|(a, h)| a >= h) {
                            continue;
                        }
                        terms.push((alpha.clone(), c.scale_rat(&Rat::from_integer(multinomial(&alpha)))));
                    }
                }
                Ok(Self::build(rank, shape, lo, hi, terms))
            }
            Shape::Chamber => {
                // functional `lead` sees the total degree k; functional lead+1 sees the tail degree
                hi[lead] = hi[lead].min(p.trunc());
                for (t, l) in lo.iter_mut().enumerate() {
                    if t <= lead {
                        *l = p.val();
                    }
                }
                let tail_cut = if rest.is_empty() { INF } else { hi[lead + 1] };
                for k in p.val()..hi[lead].min(p.trunc()) {
                    let c = p.coeff(k);
                    if c.is_zero() {
                        continue;
                    }
                    if k >= 0 {
                        for alpha in compositions(&vars, k, rank) {
                            if !Self::functionals(shape, &alpha).iter().zip(&hi).all(|(v, h)| v < h) {
                                continue;
                            }
                            terms.push((alpha.clone(), c.scale_rat(&Rat::from_integer(multinomial(&alpha)))));
                        }
                    } else {
                        // (L^{-1})^m = Σ_j (−1)^j C(m+j−1, j) R^j w_lead^{−m−j}
                        let m = -k;
                        let jmax = if rest.is_empty() { 0 } else { tail_cut - 1 };
                        for j in 0..=jmax {
                            let binom = crate::field::binomial(m + j - 1, j);
                            let sign = if j % 2 == 0 { 1 } else { -1 };
                            for beta in compositions(&rest, j, rank) {
                                let mut e = beta.clone();
                                e[lead] = -m - j;
                                if !Self::functionals(shape, &e).iter().zip(&hi).all(|(v, h)| v < h) {
                                    continue;
                                }
                                let coef = Rat::from_integer(binom.clone() * multinomial(&beta) * sign);
                                terms.push((e, c.scale_rat(&coef)));
                            }
                        }
                    }
                }
                Ok(Self::build(rank, shape, lo, hi, terms))
            }
        }
    }

    /// The jet of a univariate series in variable i.
    pub fn univariate(rank: usize, shape: Shape, i: usize, p: &WSeries) -> Jet {
        let target = vec![INF; rank];
        Self::substitute(rank, shape, &[i], p, &target).expect("single-variable substitution")
    }

    pub fn coeff(&self, e: &[i64]) -> Result<QSeries, JetError> {
        if !self.knows(e) {
            return Err(JetError::JetOrderExceeded(format!("coefficient {e:?} outside the known region")));
        }
        Ok(self.terms.get(e).cloned().unwrap_or_else(QSeries::zero))
    }

    fn check(&self, other: &Jet) {
        assert!(self.rank == other.rank && self.shape == other.shape, "jet shape or rank mismatch");
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.check(other);
        let lo = self.lo.iter().zip(&other.lo).map(|(a, b)| *a.min(b)).collect();
        let hi = self.hi.iter().zip(&other.hi).map(|(a, b)| *a.min(b)).collect();
        let terms = self.terms.iter().chain(other.terms.iter()).map(|(e, c)| (e.clone(), c.clone()));
        Self::build(self.rank, self.shape, lo, hi, terms)
    }

    pub fn neg(&self) -> Jet {
        self.map(|c| c.neg())
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.add(&other.neg())
    }

    pub fn map(&self, f: impl Fn(&QSeries) -> QSeries) -> Jet {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), f(c)));
        Self::build(self.rank, self.shape, self.lo.clone(), self.hi.clone(), terms)
    }

    pub fn scale(&self, c: &CycQ) -> Jet {
        self.map(|x| x.scale(c))
    }

    pub fn scale_rat(&self, r: &Rat) -> Jet {
        self.map(|x| x.scale_rat(r))
    }

    pub fn mul_q(&self, s: &QSeries) -> Jet {
        self.map(|x| x.mul(s))
    }

    pub fn truncate_q(&self, t: &Rat) -> Jet {
        self.map(|x| x.truncate(t))
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        self.check(other);
        let lo: Vec<i64> = self.lo.iter().zip(&other.lo).map(|(a, b)| add_bound(*a, *b)).collect();
        let hi: Vec<i64> = (0..self.rank)
            .map(|t| add_bound(self.hi[t], other.lo[t]).min(add_bound(other.hi[t], self.lo[t])))
            .collect();
        let mut acc: BTreeMap<Vec<i64>, QSeries> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                if !Self::functionals(self.shape, &e).iter().zip(&hi).all(|(v, h)| v < h) {
                    continue;
                }
                let p = ca.mul(cb);
                let slot = acc.entry(e).or_insert_with(QSeries::zero);
                *slot = slot.add(&p);
            }
        }
        Self::build(self.rank, self.shape, lo, hi, acc)
    }

    pub fn pow(&self, n: u32) -> Jet {
        let mut acc = Jet::one(self.rank, self.shape);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Shrink the known region.
    pub fn restrict(&self, hi: &[i64]) -> Jet {
        let hi: Vec<i64> = self.hi.iter().zip(hi).map(|(a, b)| *a.min(b)).collect();
        Self::build(self.rank, self.shape, self.lo.clone(), hi, self.terms.clone())
    }

    /// ∂/∂w_i.
    pub fn d_w(&self, i: usize) -> Jet {
        let shift = |t: usize| -> bool {
            match self.shape {
                Shape::Box => t == i,
                Shape::Chamber => t <= i,
            }
        };
        let lo = (0..self.rank).map(|t| if shift(t) { self.lo[t] - 1 } else { self.lo[t] }).collect();
        let hi = (0..self.rank).map(|t| if shift(t) && self.hi[t] < INF { self.hi[t] - 1 } else { self.hi[t] }).collect();
        let terms = self.terms.iter().filter(|(e, _)| e[i] != 0).map(|(e, c)| {
            let mut f = e.clone();
            f[i] -= 1;
            (f, c.scale_rat(&rat_int(e[i])))
        });
        Self::build(self.rank, self.shape, lo, hi, terms)
    }

    /// q d/dq on coefficients.
    pub fn d_tau(&self) -> Jet {
        self.map(|c| c.d_tau())
    }

    /// Permute variables: variable i of the result is variable perm[i] of self (box only).
    pub fn permute(&self, perm: &[usize]) -> Jet {
        assert_eq!(self.shape, Shape::Box, "permuting variables needs a box jet");
        let lo = perm.iter().map(|&p| self.lo[p]).collect();
        let hi = perm.iter().map(|&p| self.hi[p]).collect();
        let terms = self.terms.iter().map(|(e, c)| (perm.iter().map(|&p| e[p]).collect(), c.clone()));
        Self::build(self.rank, self.shape, lo, hi, terms)
    }

    /// Reinterpret a chamber expansion as a Laurent jet on the box
    /// {lo_box_i ≤ e_i < hi_box_i}. Fails when a stored term has a pole beyond
    /// the declared orders, or when the chamber region does not cover the box.
    pub fn to_box(&self, pole_orders: &[i64], hi_box: &[i64]) -> Result<Jet, JetError> {
        if self.shape == Shape::Box {
            for e in self.terms.keys() {
                if e.iter().zip(pole_orders).any(|(x, p)| *x < -p) {
                    return Err(JetError::NonOrthogonalPoles(e.clone()));
                }
            }
            return Ok(self.restrict(hi_box));
        }
        for e in self.terms.keys() {
            if e.iter().zip(pole_orders).any(|(x, p)| *x < -p) {
                return Err(JetError::NonOrthogonalPoles(e.clone()));
            }
        }
        for t in 0..self.rank {
            let need: i64 = (t..self.rank).map(|i| hi_box[i] - 1).sum();
            if need >= self.hi[t] {
                return Err(JetError::JetOrderExceeded(format!(
                    "chamber functional {t} is known below {} but the box needs {}",
                    self.hi[t],
                    need + 1
                )));
            }
        }
        let lo = pole_orders.iter().map(|p| -p).collect();
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().zip(hi_box).all(|(x, h)| x < h))
            .map(|(e, c)| (e.clone(), c.clone()));
        Ok(Self::build(self.rank, Shape::Box, lo, hi_box.to_vec(), terms))
    }

    /// Coefficientwise agreement on the common region and common q-orders.
    pub fn agrees_with(&self, other: &Jet) -> bool {
        self.check(other);
        let keys: std::collections::BTreeSet<&Vec<i64>> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().filter(|e| self.knows(e) && other.knows(e)).all(|e| {
            let a = self.terms.get(e).cloned().unwrap_or_else(QSeries::zero);
            let b = other.terms.get(e).cloned().unwrap_or_else(QSeries::zero);
            a.eq_common(&b)
        })
    }

    /// Exact equality on every exponent of the box lo ≤ e < hi up to O(q^t).
    /// Both jets must know the whole box and carry enough q-precision.
    pub fn equal_on_box(&self, other: &Jet, lo: &[i64], hi: &[i64], t: &Rat) -> Result<bool, JetError> {
        self.check(other);
        let mut exps = vec![vec![]];
        for (l, h) in lo.iter().zip(hi) {
            exps = exps.into_iter().flat_map(|base: Vec<i64>| (*l..*h).map(move |x| [base.clone(), vec![x]].concat())).collect();
        }
        for e in exps {
            let a = self.coeff(&e)?;
            let b = other.coeff(&e)?;
            if !a.eq_to_order(&b, t).map_err(|err| JetError::JetOrderExceeded(err.to_string()))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms.iter().map(|(e, c)| json!({"exp": e, "coeff": c.to_json()})).collect();
        let bound = |v: &Vec<i64>| -> Vec<Value> { v.iter().map(|&h| if h >= INF { Value::Null } else { json!(h) }).collect() };
        json!({
            "rank": self.rank,
            "shape": match self.shape { Shape::Box => "box", Shape::Chamber => "chamber" },
            "lo": self.lo,
            "hi": bound(&self.hi),
            "terms": terms,
        })
    }

    pub fn from_json(v: &Value) -> Result<Jet, JetError> {
        let bad = |m: &str| JetError::Json(m.to_string());
        let rank = v["rank"].as_u64().ok_or_else(|| bad("rank"))? as usize;
        let shape = match v["shape"].as_str() {
            Some("box") => Shape::Box,
            Some("chamber") => Shape::Chamber,
            _ => return Err(bad("shape")),
        };
        let ints = |key: &str, null: Option<i64>| -> Result<Vec<i64>, JetError> {
            v[key]
                .as_array()
                .ok_or_else(|| bad(key))?
                .iter()
                .map(|x| x.as_i64().or(if x.is_null() { null } else { None }).ok_or_else(|| bad(key)))
                .collect()
        };
        let lo = ints("lo", None)?;
        let hi = ints("hi", Some(INF))?;
        let mut terms = Vec::new();
        for t in v["terms"].as_array().ok_or_else(|| bad("terms"))? {
            let e: Vec<i64> = t["exp"].as_array().ok_or_else(|| bad("exp"))?.iter().map(|x| x.as_i64().ok_or_else(|| bad("exp"))).collect::<Result<_, _>>()?;
            let c = QSeries::from_json(&t["coeff"]).map_err(|e| JetError::Json(e.to_string()))?;
            terms.push((e, c));
        }
        if lo.len() != rank || hi.len() != rank {
            return Err(bad("bound length"));
        }
        Ok(Self::build(rank, shape, lo, hi, terms))
    }
}

/// A jet tagged with weight, index matrix and per-variable pole orders.
#[derive(Clone, Debug, PartialEq)]
pub struct JetForm {
    pub jet: Jet,
    pub weight: i64,
    pub index: Vec<Vec<Rat>>,
    pub pole_orders: Vec<i64>,
}

impl JetForm {
    /// Tag a jet as a Jacobi-type form; the index must give an integral
    /// quadratic form 2B_M (2M_ii and 4M_ij integral).
    pub fn jacobi(jet: Jet, weight: i64, index: Vec<Vec<Rat>>, pole_orders: Vec<i64>) -> Result<JetForm, JetError> {
        let n = jet.rank();
        if index.len() != n || index.iter().any(|r| r.len() != n) {
            return Err(JetError::Mismatch);
        }
        for i in 0..n {
            for j in 0..n {
                let f = if i == j { rat_int(2) } else { rat_int(4) };
                if index[i][j] != index[j][i] || !(&index[i][j] * f).is_integer() {
                    return Err(JetError::Json(format!("index entry ({i},{j}) fails the integrality check")));
                }
            }
        }
        Ok(JetForm { jet, weight, index, pole_orders })
    }

    pub fn to_json(&self) -> Value {
        let index: Vec<Vec<String>> = self.index.iter().map(|r| r.iter().map(crate::field::fmt_rat).collect()).collect();
        json!({"weight": self.weight, "index": index, "pole_orders": self.pole_orders, "jet": self.jet.to_json()})
    }

    pub fn from_json(v: &Value) -> Result<JetForm, JetError> {
        let bad = |m: &str| JetError::Json(m.to_string());
        let jet = Jet::from_json(&v["jet"])?;
        let weight = v["weight"].as_i64().ok_or_else(|| bad("weight"))?;
        let index = v["index"]
            .as_array()
            .ok_or_else(|| bad("index"))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| bad("index row"))?
                    .iter()
                    .map(|x| x.as_str().and_then(crate::field::parse_rat).ok_or_else(|| bad("index entry")))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        let pole_orders = v["pole_orders"].as_array().ok_or_else(|| bad("pole_orders"))?.iter().map(|x| x.as_i64().ok_or_else(|| bad("pole order"))).collect::<Result<_, _>>()?;
        JetForm::jacobi(jet, weight, index, pole_orders)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use crate::kernels::{a_hat, theta_hat, theta_hat_inv};

    #[test]
    fn chamber_inverse_of_sum() {
        // 1/(w1 + w2) = Σ_j (−1)^j w2^j w1^{−1−j}
        let p = WSeries::monomial(-1, QSeries::one(), 5);
        let j = Jet::substitute(2, Shape::Chamber, &[0, 1], &p, &[INF, 4]).unwrap();
        for k in 0..4 {
            let c = j.coeff(&[-1 - k, k]).unwrap();
            assert_eq!(c, QSeries::one().scale_rat(&rat_int(if k % 2 == 0 { 1 } else { -1 })));
        }
        assert!(j.coeff(&[-5, 4]).is_err());
        let sum = Jet::from_terms(2, Shape::Chamber, vec![INF, INF], [(vec![1, 0], QSeries::one()), (vec![0, 1], QSeries::one())]);
        let prod = j.mul(&sum);
        assert!(prod.agrees_with(&Jet::one(2, Shape::Chamber)));
        assert_eq!(prod.hi()[1], 4);
    }

    #[test]
    fn box_substitution_of_sum() {
        // Θ(w1 + w2) in a box equals the product formula expansion
        let th = theta_hat(4, 8);
        let j = Jet::substitute(2, Shape::Box, &[0, 1], &th, &[4, 4]).unwrap();
        assert_eq!(j.coeff(&[1, 0]).unwrap(), QSeries::one());
        assert_eq!(j.coeff(&[2, 1]).unwrap(), th.coeff(3).scale_rat(&rat_int(3)));
        assert!(Jet::substitute(2, Shape::Box, &[0, 1], &th, &[5, 5]).is_err());
        assert!(Jet::substitute(2, Shape::Box, &[0, 1], &a_hat(4, 6), &[3, 3]).is_err());
    }

    #[test]
    fn products_track_regions() {
        let inv = Jet::univariate(2, Shape::Box, 0, &theta_hat_inv(5, 5));
        let th = Jet::univariate(2, Shape::Box, 0, &theta_hat(5, 7));
        let prod = inv.mul(&th);
        assert_eq!(prod.hi()[0], 6);
        assert!(prod.agrees_with(&Jet::one(2, Shape::Box)));
        assert!(!prod.coeff(&[0, 0]).unwrap().is_zero());
    }

    #[test]
    fn derivative_matches_univariate() {
        let th = theta_hat(5, 8);
        let j = Jet::univariate(1, Shape::Box, 0, &th).d_w(0);
        assert!(j.agrees_with(&Jet::univariate(1, Shape::Box, 0, &th.d_w())));
        assert_eq!(j.hi()[0], 7);
    }

    #[test]
    fn chamber_to_box_checks_poles() {
        let p = WSeries::monomial(-1, QSeries::one(), 5);
        let j = Jet::substitute(2, Shape::Chamber, &[0, 1], &p, &[INF, 4]).unwrap();
        assert!(matches!(j.to_box(&[1, 1], &[2, 2]), Err(JetError::NonOrthogonalPoles(_))));
        let one_over = Jet::from_terms(2, Shape::Chamber, vec![9, 5], [(vec![-1, -1], QSeries::one())]);
        let b = one_over.to_box(&[1, 1], &[5, 5]).unwrap();
        assert_eq!(b.shape(), Shape::Box);
        assert!(one_over.to_box(&[1, 1], &[6, 5]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let j = Jet::substitute(2, Shape::Chamber, &[0, 1], &theta_hat_inv(3, 4), &[INF, 3]).unwrap();
        assert_eq!(Jet::from_json(&j.to_json()).unwrap(), j);
        let half = rat(-1, 2);
        let form = JetForm::jacobi(j.clone(), 1, vec![vec![half.clone(), half.clone()], vec![half.clone(), half]], vec![1, 1]).unwrap();
        assert_eq!(JetForm::from_json(&form.to_json()).unwrap(), form);
        assert!(JetForm::jacobi(j, 1, vec![vec![rat(1, 3), rat_int(0)], vec![rat_int(0), rat_int(0)]], vec![1, 1]).is_err());
    }
}
