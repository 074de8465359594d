//! Quasimodular forms as polynomials in explicit generators, and certification
//! of q-series by exact linear algebra.
//!
//! Level 1 uses 𝔾₂, 𝔾₄, 𝔾₆ and is complete. Level N > 1 works with the series
//! g(τ') = f(Nτ') and a heuristic family of generators in τ': the depth
//! generator 𝔾₂(Nτ'), the weight-2 forms 𝔾₂(τ') − d𝔾₂(dτ'), the Eisenstein
//! series 𝔾₄(dτ') and 𝔾₆(dτ') for d | N², and the weight-1 forms
//! h_{u,v}(Nτ') = Â(uτ + v) + u for (u, v) ∈ (1/N)ℤ² ∖ ℤ².

use crate::cyclotomic::CycQ;
use crate::eisenstein::{g_series, g_series_scaled};
use crate::field::{fmt_rat, rat, rat_int, Rat};
use crate::fourier::{FourierForm, Translate};
use crate::linalg::{solve, Solution};
use crate::qseries::{QSeries, SeriesError};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub const DEFAULT_MARGIN: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertError {
    #[error("level {0} is not supported (use 1, 2, 3 or 4)")]
    UnsupportedLevel(u64),
    #[error("series known to {have} coefficients, certification needs {need}")]
    InsufficientTruncation { need: usize, have: usize },
    #[error("re-certification failed: {0}")]
    CertifyFailed(String),
    #[error("vanishing Pochhammer denominator at weight {0}")]
    PochhammerZero(i64),
    #[error("mismatched rings")]
    RingMismatch,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// One generator of the ring, as a function of τ' (τ itself at level 1).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Gen {
    /// 𝔾_k(dτ').
    Eis { k: u32, d: u64 },
    /// 𝔾₂(τ') − d𝔾₂(dτ').
    E2Diff { d: u64 },
    /// Â(uτ + v) + u evaluated at τ = Nτ'.
    WeightOne { u: Rat, v: Rat, n: u64 },
}

impl Gen {
    pub fn weight(&self) -> u32 {
        match self {
            Gen::Eis { k, .. } => *k,
            Gen::E2Diff { .. } => 2,
            Gen::WeightOne { .. } => 1,
        }
    }

    /// q-series in τ' to O(q'^t).
    pub fn series(&self, t: i64) -> QSeries {
        match self {
            Gen::Eis { k, d } => g_series_scaled(*k, *d, t),
            Gen::E2Diff { d } => g_series(2, t).sub(&g_series_scaled(2, *d, t).scale_rat(&rat_int(*d as i64))),
            Gen::WeightOne { u, v, n } => weight_one_series(u, v, *n, t),
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::Eis { k, d: 1 } => write!(f, "G{k}"),
            Gen::Eis { k, d } => write!(f, "G{k}({d}τ)"),
            Gen::E2Diff { d } => write!(f, "G2-{d}G2({d}τ)"),
            Gen::WeightOne { u, v, .. } => write!(f, "h[{},{}]", fmt_rat(u), fmt_rat(v)),
        }
    }
}

fn reduce_coeffs(s: &QSeries) -> QSeries {
    s.map_coeffs(|c| c.try_reduce_to(c.minimal_modulus()).unwrap_or_else(|| c.clone()))
}

/// h_{u,v}(Nτ') = D_w log(Θ|(u,v))(0), the log-derivative at w = 0 of the slashed Θ.
fn weight_one_series(u: &Rat, v: &Rat, n: u64, t: i64) -> QSeries {
    let need = rat(t, n as i64);
    let mut big = &need + rat_int(4);
    loop {
        let th = FourierForm::big_theta(&big).slash(&Translate::single(u.clone(), v.clone())).expect("rank-1 slash");
        if th.trunc() >= &need {
            let w = th.to_wseries(2).expect("no cleared poles");
            let ratio = w.coeff(1).div(&w.coeff(0)).expect("Θ does not vanish off the lattice");
            return reduce_coeffs(&ratio.rescale(&rat_int(n as i64)).truncate_int(t));
        }
        big *= rat_int(2);
    }
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// The generators at a level; index 0 is always the depth generator.
pub fn generators(level: u64) -> Result<Vec<Gen>, CertError> {
    match level {
        1 => Ok(vec![Gen::Eis { k: 2, d: 1 }, Gen::Eis { k: 4, d: 1 }, Gen::Eis { k: 6, d: 1 }]),
        2..=4 => {
            let n = level;
            let mut gens = vec![Gen::Eis { k: 2, d: n }];
            let ds = divisors(n * n);
            for &d in ds.iter().filter(|d| **d > 1) {
                gens.push(Gen::E2Diff { d });
            }
            for k in [4, 6] {
                for &d in &ds {
                    gens.push(Gen::Eis { k, d });
                }
            }
            // one representative of each ±pair of nonzero classes in (ℤ/N)²
            let mut seen = Vec::new();
            for a in 0..n as i64 {
                for b in 0..n as i64 {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    let neg = ((n as i64 - a) % n as i64, (n as i64 - b) % n as i64);
                    if seen.contains(&neg) {
                        continue;
                    }
                    seen.push((a, b));
                    gens.push(Gen::WeightOne { u: rat(a, n as i64), v: rat(b, n as i64), n });
                }
            }
            Ok(gens)
        }
        _ => Err(CertError::UnsupportedLevel(level)),
    }
}

/// Exponent vectors of all generator monomials of weight k and depth ≤ p.
fn monomials(gens: &[Gen], k: u32, p: u32) -> Vec<Vec<u32>> {
    fn rec(gens: &[Gen], i: usize, left: u32, p: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == gens.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let w = gens[i].weight();
        let max = if i == 0 { (left / w).min(p) } else { left / w };
        for e in 0..=max {
            cur.push(e);
            rec(gens, i + 1, left - e * w, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(gens, 0, k, p, &mut Vec::new(), &mut out);
    out
}

fn monomial_name(gens: &[Gen], e: &[u32]) -> String {
    let parts: Vec<String> = gens
        .iter()
        .zip(e)
        .filter(|(_, x)| **x > 0)
        .map(|(g, x)| if *x == 1 { g.to_string() } else { format!("{g}^{x}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Series of monomials, reusing generator powers.
fn monomial_series(gens: &[Gen], monos: &[Vec<u32>], t: i64) -> Vec<QSeries> {
    let mut powers: BTreeMap<(usize, u32), QSeries> = BTreeMap::new();
    let base: Vec<QSeries> = gens.iter().map(|g| g.series(t)).collect();
    let mut out = Vec::with_capacity(monos.len());
    for m in monos {
        let mut acc = QSeries::one().add(&QSeries::big_o(rat_int(t)));
        for (i, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let p = powers.entry((i, e)).or_insert_with(|| base[i].pow(e as u64).truncate_int(t)).clone();
            acc = acc.mul(&p).truncate_int(t);
        }
        out.push(acc);
    }
    out
}

/// Monomials of weight k and depth ≤ p, with their q-series in the level's variable.
pub fn spanning_set(level: u64, k: u32, p: u32, t: i64) -> Result<Vec<(String, QSeries)>, CertError> {
    let gens = generators(level)?;
    let monos = monomials(&gens, k, p);
    let series = monomial_series(&gens, &monos, t);
    Ok(monos.iter().map(|m| monomial_name(&gens, m)).zip(series).collect())
}

/// A homogeneous element of the ring: Σ c_e Π gen_i^{e_i}.
#[derive(Clone, Debug, PartialEq)]
pub struct QMPoly {
    level: u64,
    weight: i64,
    gens: Arc<Vec<Gen>>,
    terms: BTreeMap<Vec<u32>, CycQ>,
}

impl QMPoly {
    pub fn zero(level: u64, weight: i64) -> Result<QMPoly, CertError> {
        Ok(QMPoly { level, weight, gens: Arc::new(generators(level)?), terms: BTreeMap::new() })
    }

    /// A single generator, by position in [`generators`].
    pub fn generator(level: u64, i: usize) -> Result<QMPoly, CertError> {
        let gens = generators(level)?;
        let mut e = vec![0; gens.len()];
        e[i] = 1;
        let weight = gens[i].weight() as i64;
        Ok(QMPoly { level, weight, gens: Arc::new(gens), terms: BTreeMap::from([(e, CycQ::one())]) })
    }

    pub fn constant(level: u64, c: CycQ) -> Result<QMPoly, CertError> {
        let gens = generators(level)?;
        let e = vec![0; gens.len()];
        Ok(QMPoly { level, weight: 0, gens: Arc::new(gens), terms: BTreeMap::from([(e, c)]) }.cleaned())
    }

    fn cleaned(mut self) -> QMPoly {
        self.terms.retain(|_, c| !c.is_zero());
        self
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree in the depth generator.
    pub fn depth(&self) -> u32 {
        self.terms.keys().map(|e| e[0]).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (String, &CycQ)> {
        self.terms.iter().map(|(e, c)| (monomial_name(&self.gens, e), c))
    }

    /// The coefficient of a monomial given by its name.
    pub fn coeff_of(&self, name: &str) -> CycQ {
        self.terms().find(|(n, _)| n == name).map(|(_, c)| c.clone()).unwrap_or_else(CycQ::zero)
    }

    /// q-expansion in the level's variable (τ' = τ/N for N > 1).
    pub fn expand(&self, t: i64) -> QSeries {
        let monos: Vec<Vec<u32>> = self.terms.keys().cloned().collect();
        let series = monomial_series(&self.gens, &monos, t);
        let mut acc = QSeries::big_o(rat_int(t));
        for (s, c) in series.iter().zip(self.terms.values()) {
            acc = acc.add(&s.scale(c));
        }
        acc
    }

    /// The q-expansion in τ itself.
    pub fn expand_tau(&self, t: i64) -> QSeries {
        let s = self.expand(t * self.level as i64);
        if self.level == 1 {
            s
        } else {
            s.scale_exponents(self.level)
        }
    }

    fn check(&self, other: &QMPoly) -> Result<(), CertError> {
        if self.level != other.level {
            return Err(CertError::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &QMPoly) -> Result<QMPoly, CertError> {
        self.check(other)?;
        if self.weight != other.weight && !self.is_zero() && !other.is_zero() {
            return Err(CertError::RingMismatch);
        }
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let slot = terms.entry(e.clone()).or_insert_with(CycQ::zero);
            *slot += c;
        }
        let weight = if self.is_zero() { other.weight } else { self.weight };
        Ok(QMPoly { terms, weight, ..self.clone() }.cleaned())
    }

    pub fn sub(&self, other: &QMPoly) -> Result<QMPoly, CertError> {
        self.add(&other.scale(&CycQ::from_int(-1)))
    }

    pub fn scale(&self, c: &CycQ) -> QMPoly {
        let terms = self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect();
        QMPoly { terms, ..self.clone() }.cleaned()
    }

    pub fn mul(&self, other: &QMPoly) -> Result<QMPoly, CertError> {
        self.check(other)?;
        let mut terms: BTreeMap<Vec<u32>, CycQ> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let slot = terms.entry(e).or_insert_with(CycQ::zero);
                *slot += &(c1 * c2);
            }
        }
        Ok(QMPoly { terms, weight: self.weight + other.weight, ..self.clone() }.cleaned())
    }

    /// δ_τ = −½ ∂/∂(depth generator), so that δ𝔾₂ = −½ and δ𝕖₂ = 1.
    pub fn delta(&self) -> QMPoly {
        let mut terms: BTreeMap<Vec<u32>, CycQ> = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[0] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[0] -= 1;
            let slot = terms.entry(e2).or_insert_with(CycQ::zero);
            *slot += &c.scale(&rat(-(e[0] as i64), 2));
        }
        QMPoly { terms, weight: self.weight - 2, ..self.clone() }.cleaned()
    }

    /// W: multiplication by the weight.
    pub fn w_op(&self) -> QMPoly {
        self.scale(&CycQ::from_int(self.weight))
    }

    /// D_τ = q d/dq (in τ), by differentiating the expansion and re-certifying.
    pub fn d_tau(&self, margin: usize) -> Result<QMPoly, CertError> {
        let depth = self.depth() + 1;
        let need = span_size_hint(self.level, (self.weight + 2) as u32, depth) + margin + 8;
        let mut t = need as i64;
        loop {
            let s = self.expand(t);
            let ds = s.d_tau().scale_rat(&rat(1, self.level as i64));
            match certify_in_variable(&ds, self.weight + 2, self.level, depth, margin)? {
                Outcome::Done(c) => {
                    return match (c.status, c.poly) {
                        (Status::Certified, Some(p)) => Ok(p),
                        _ => Err(CertError::CertifyFailed(format!("D_τ of a weight {} form", self.weight))),
                    }
                }
                Outcome::NeedMore(n) => t = t.max(n as i64) * 2,
            }
        }
    }

    /// Serre derivative ϑ = D_τ − 𝕖₂·W = D_τ + 2k𝔾₂.
    pub fn serre(&self, margin: usize) -> Result<QMPoly, CertError> {
        let g2 = QMPoly::generator(self.level, 0)?;
        self.d_tau(margin)?.add(&g2.mul(self)?.scale(&CycQ::from_int(2 * self.weight)))
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms().map(|(n, c)| json!([n, c.to_json()])).collect();
        json!({"level": self.level, "weight": self.weight, "depth": self.depth(), "terms": terms})
    }
}

impl fmt::Display for QMPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|(n, c)| format!("({c})*{n}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn span_size_hint(level: u64, k: u32, p: u32) -> usize {
    generators(level).map(|g| monomials(&g, k, p).len()).unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Certified,
    Failed,
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Certified => "certified-to-order",
            Status::Failed => "failed",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// The outcome of a membership check.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub status: Status,
    pub weight: i64,
    pub level: u64,
    pub depth: u32,
    pub basis: Vec<String>,
    pub solution: Vec<CycQ>,
    pub solve_order: usize,
    pub margin: usize,
    pub poly: Option<QMPoly>,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    pub fn to_json(&self) -> Value {
        json!({
            "status": self.status.as_str(),
            "weight": self.weight,
            "level": self.level,
            "depth": self.depth,
            "basis": self.basis,
            "solution": self.solution.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            "solve_order": self.solve_order,
            "margin": self.margin,
        })
    }
}

enum Outcome {
    Done(Certificate),
    NeedMore(usize),
}

/// Coefficients 0..t of a series with integral exponents, or None.
fn integral_coeffs(s: &QSeries, t: usize) -> Option<Vec<CycQ>> {
    if s.terms().any(|(e, _)| !e.is_integer() || e.is_negative()) {
        return None;
    }
    Some((0..t as i64).map(|n| s.coeff_int(n).unwrap_or_else(|_| CycQ::zero())).collect())
}

fn known_len(s: &QSeries) -> usize {
    match s.trunc() {
        Some(t) => t.ceil().to_integer().to_usize().unwrap_or(0),
        None => usize::MAX / 2,
    }
}

/// Indices of a maximal independent prefix-greedy subset of rows, and its pivot columns.
fn independent_rows(rows: &[Vec<CycQ>]) -> (Vec<usize>, Vec<usize>) {
    let mut chosen = Vec::new();
    let mut reduced: Vec<(usize, Vec<CycQ>)> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut r = r.clone();
        for (pc, prow) in &reduced {
            if r[*pc].is_zero() {
                continue;
            }
            let f = r[*pc].clone();
            for (x, y) in r.iter_mut().zip(prow) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        if let Some(pc) = r.iter().position(|x| !x.is_zero()) {
            let inv = r[pc].inverse().expect("nonzero");
            for x in r.iter_mut() {
                *x *= &inv;
            }
            reduced.push((pc, r));
            chosen.push(i);
        }
    }
    (chosen, reduced.into_iter().map(|(pc, _)| pc).collect())
}

fn certify_in_variable(target: &QSeries, weight: i64, level: u64, depth: u32, margin: usize) -> Result<Outcome, CertError> {
    let gens = generators(level)?;
    let heuristic = level > 1;
    let no = |status| Certificate {
        status,
        weight,
        level,
        depth,
        basis: vec![],
        solution: vec![],
        solve_order: 0,
        margin,
        poly: None,
    };
    let fail_status = if heuristic { Status::Inconclusive } else { Status::Failed };
    let have = known_len(target);
    if weight < 0 {
        let zero = target.truncate_int(have.min(1 << 20) as i64).is_zero();
        return Ok(Outcome::Done(if zero { no(Status::Certified) } else { no(fail_status) }));
    }
    let monos = monomials(&gens, weight as u32, depth);
    let mut cap = monos.len() * 2 + margin + 16;
    let (t, rows, chosen, b) = loop {
        let t = have.min(cap);
        let series = monomial_series(&gens, &monos, t as i64);
        let rows: Vec<Vec<CycQ>> = series.iter().map(|s| integral_coeffs(s, t).expect("generators are power series")).collect();
        let (chosen, pivots) = independent_rows(&rows);
        // rank of a column prefix counts the pivots inside it
        let b = pivots.iter().max().map_or(0, |p| p + 1);
        if b + margin <= t {
            break (t, rows, chosen, b);
        }
        if b + margin > have {
            return Ok(Outcome::NeedMore(b + margin));
        }
        cap = b + margin;
    };
    let Some(rhs) = integral_coeffs(target, t) else {
        return Ok(Outcome::Done(no(fail_status)));
    };
    let basis_names: Vec<String> = chosen.iter().map(|&i| monomial_name(&gens, &monos[i])).collect();
    let a: Vec<Vec<CycQ>> = (0..b).map(|n| chosen.iter().map(|&i| rows[i][n].clone()).collect()).collect();
    let x = match solve(&a, &rhs[..b]) {
        Solution::Unique(x) | Solution::Underdetermined(x) => x,
        Solution::Inconsistent => {
            let mut c = no(fail_status);
            c.basis = basis_names;
            c.solve_order = b;
            return Ok(Outcome::Done(c));
        }
    };
    let ok = (b..b + margin).all(|n| {
        let mut acc = CycQ::zero();
        for (xi, &i) in x.iter().zip(&chosen) {
            acc += &(xi * &rows[i][n]);
        }
        acc == rhs[n]
    });
    let terms: BTreeMap<Vec<u32>, CycQ> = chosen.iter().zip(&x).map(|(&i, c)| (monos[i].clone(), c.clone())).collect();
    let poly = QMPoly { level, weight, gens: Arc::new(gens), terms }.cleaned();
    Ok(Outcome::Done(Certificate {
        status: if ok { Status::Certified } else { fail_status },
        weight,
        level,
        depth,
        basis: basis_names,
        solution: x,
        solve_order: b,
        margin,
        poly: if ok { Some(poly) } else { None },
    }))
}

/// Certify a q-series (in τ) as a quasimodular form of the given weight, level and depth bound.
pub fn certify(target: &QSeries, weight: i64, level: u64, depth: u32, margin: usize) -> Result<Certificate, CertError> {
    generators(level)?;
    let g = if level == 1 { target.clone() } else { target.rescale(&rat_int(level as i64)) };
    match certify_in_variable(&g, weight, level, depth, margin)? {
        Outcome::Done(c) => Ok(c),
        Outcome::NeedMore(n) => Err(CertError::InsufficientTruncation { need: n, have: known_len(&g) }),
    }
}

/// Certify, and return the polynomial on success.
pub fn certify_poly(target: &QSeries, weight: i64, level: u64, depth: u32, margin: usize) -> Result<QMPoly, CertError> {
    let c = certify(target, weight, level, depth, margin)?;
    c.poly.ok_or_else(|| CertError::CertifyFailed(format!("weight {weight} level {level} depth {depth}: {}", c.status.as_str())))
}

/// 𝕖₂ as a ring element.
pub fn e2_quasi_poly(level: u64) -> Result<QMPoly, CertError> {
    Ok(QMPoly::generator(level, 0)?.scale(&CycQ::from_int(-2)))
}

fn rising(x: &Rat, n: u32) -> Rat {
    (0..n).fold(rat_int(1), |acc, i| acc * (x + rat_int(i as i64)))
}

fn factorial_rat(n: u32) -> Rat {
    (1..=n as i64).fold(rat_int(1), |acc, i| acc * rat_int(i))
}

/// The three equivalent conditions on a tuple g_k, g_{k−2}, …, g_{k−2p}:
/// (i) δ^i g_k = g_{k−2i}; (ii) the D_τ-combinations are modular;
/// (iii) the (D_τ + 𝔾₂)-combinations with half-integer Pochhammer symbols are modular.
pub fn equivalence_conditions(gs: &[QMPoly], margin: usize) -> Result<[bool; 3], CertError> {
    let p = gs.len() as u32 - 1;
    let k = gs[0].weight();
    let level = gs[0].level();
    let first = (0..=p as usize).all(|i| {
        let mut d = gs[0].clone();
        for _ in 0..i {
            d = d.delta();
        }
        d == gs[i] || (d.is_zero() && gs[i].is_zero())
    });
    let g2 = QMPoly::generator(level, 0)?;
    let e2 = e2_quasi_poly(level)?;
    let mut second = true;
    let mut third = true;
    for i in 0..p {
        let wt = k - 2 * i as i64;
        let mut combo2 = QMPoly::zero(level, wt)?;
        let mut combo3 = QMPoly::zero(level, wt)?;
        if k == 2 * p as i64 && i == p - 1 {
            combo2 = gs[i as usize].sub(&e2.mul(&gs[i as usize + 1])?)?;
        }
        for m in 0..=(p - i) {
            let g = &gs[(i + m) as usize];
            let sign = if m % 2 == 0 { rat_int(1) } else { rat_int(-1) };
            if !(k == 2 * p as i64 && i == p - 1) {
                let poch = rising(&rat_int(wt - m as i64 - 1), m);
                if poch.is_zero() {
                    return Err(CertError::PochhammerZero(wt));
                }
                let mut d = g.clone();
                for _ in 0..m {
                    d = d.d_tau(margin)?;
                }
                combo2 = combo2.add(&d.scale(&CycQ::from_rat(&sign / (poch * factorial_rat(m)))))?;
            }
            let poch = rising(&(rat_int(wt - m as i64 - 1) - rat(1, 2)), m);
            let mut d = g.clone();
            for _ in 0..m {
                d = d.d_tau(margin)?.add(&g2.mul(&d)?)?;
            }
            combo3 = combo3.add(&d.scale(&CycQ::from_rat(&sign / (poch * factorial_rat(m)))))?;
        }
        second &= combo2.depth() == 0;
        third &= combo3.depth() == 0;
    }
    Ok([first, second, third])
}

/// A level-1 element of weight k and depth ≤ p with coefficients in [−3, 3].
pub fn random_level_one<R: Rng>(rng: &mut R, k: u32, p: u32) -> QMPoly {
    let gens = generators(1).expect("level 1 is supported");
    let mut acc = QMPoly::zero(1, k as i64).expect("level 1");
    for m in monomials(&gens, k, p) {
        let c = rng.gen_range(-3i64..=3);
        if c == 0 {
            continue;
        }
        let mut term = QMPoly::constant(1, CycQ::from_int(c)).expect("level 1");
        for (i, &e) in m.iter().enumerate() {
            for _ in 0..e {
                term = term.mul(&QMPoly::generator(1, i).expect("level 1")).expect("same level");
            }
        }
        acc = acc.add(&term).expect("same weight");
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::qbracket;
    use crate::families::Family;
    use crate::qseries::QSeries;

    #[test]
    fn spanning_sets_at_level_one() {
        let names: Vec<String> = spanning_set(1, 4, 2, 5).unwrap().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, vec!["G4", "G2^2"]);
        let names: Vec<String> = spanning_set(1, 2, 1, 5).unwrap().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, vec!["G2"]);
        let names: Vec<String> = spanning_set(1, 0, 0, 5).unwrap().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, vec!["1"]);
        assert_eq!(spanning_set(5, 2, 1, 5).err(), Some(CertError::UnsupportedLevel(5)));
    }

    #[test]
    fn q2_bracket_is_g2() {
        let s = qbracket(&Family::q(2).function().unwrap(), 20).unwrap();
        let c = certify(&s, 2, 1, 1, DEFAULT_MARGIN).unwrap();
        assert!(c.is_certified());
        assert_eq!(c.basis, vec!["G2"]);
        assert_eq!(c.solution, vec![CycQ::one()]);
        let one = qbracket(&crate::families::PartitionFunction::one(), 15).unwrap();
        let c = certify(&one, 0, 1, 0, DEFAULT_MARGIN).unwrap();
        assert!(c.is_certified());
        assert_eq!(c.solution, vec![CycQ::one()]);
    }

    #[test]
    fn bare_q_fails_in_weight_two() {
        let q = QSeries::monomial(&rat_int(1), CycQ::one()).add(&QSeries::big_o(rat_int(20)));
        let c = certify(&q, 2, 1, 0, DEFAULT_MARGIN).unwrap();
        assert_eq!(c.status, Status::Failed);
    }

    #[test]
    fn insufficient_truncation() {
        let s = g_series(4, 5);
        assert!(matches!(certify(&s, 4, 1, 0, DEFAULT_MARGIN), Err(CertError::InsufficientTruncation { .. })));
    }

    #[test]
    fn delta_and_commutator() {
        let g2 = QMPoly::generator(1, 0).unwrap();
        assert_eq!(g2.delta(), QMPoly::constant(1, CycQ::from_rat(rat(-1, 2))).unwrap());
        let g4 = QMPoly::generator(1, 1).unwrap();
        let lhs = g4.d_tau(DEFAULT_MARGIN).unwrap().delta();
        assert_eq!(lhs, g4.w_op());
        let th = g4.serre(DEFAULT_MARGIN).unwrap();
        assert_eq!(th.depth(), 0);
        assert_eq!(th.terms().map(|(n, _)| n).collect::<Vec<_>>(), vec!["G6"]);
    }

    #[test]
    fn round_trip_expansion() {
        let g2 = QMPoly::generator(1, 0).unwrap();
        let g6 = QMPoly::generator(1, 2).unwrap();
        let p = g2.mul(&g2).unwrap().mul(&g2).unwrap().add(&g6.scale(&CycQ::from_int(3))).unwrap();
        let s = p.expand(40);
        assert_eq!(certify_poly(&s, 6, 1, 3, DEFAULT_MARGIN).unwrap(), p);
    }

    #[test]
    fn weight_one_vanishes_at_level_two() {
        for g in generators(2).unwrap() {
            if let Gen::WeightOne { .. } = g {
                assert!(g.series(12).is_zero(), "{g}");
            }
        }
        let h = Gen::WeightOne { u: rat_int(0), v: rat(1, 3), n: 3 }.series(12);
        assert!(!h.is_zero());
    }

    #[test]
    fn level_n_span_contains_level_one() {
        let s = g_series(4, 20);
        let c = certify(&s, 4, 2, 0, DEFAULT_MARGIN).unwrap();
        assert!(c.is_certified(), "{:?}", c.status);
        let p = c.poly.unwrap();
        assert!(p.expand_tau(20).eq_common(&s));
    }

    #[test]
    fn equivalent_conditions_agree() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for k in (2..=10u32).step_by(2) {
            for p in 1..=3u32.min(k / 2) {
                let g = random_level_one(&mut rng, k, p);
                let mut tuple = vec![g.clone()];
                for i in 1..=p as usize {
                    tuple.push(tuple[i - 1].delta());
                }
                let ok = equivalence_conditions(&tuple, DEFAULT_MARGIN).unwrap();
                assert_eq!(ok, [true; 3], "k={k} p={p} g={g}");
                // break (i) by moving one lower entry off δ^i g
                let j = p as usize;
                let w = tuple[j].weight();
                let bump = if w == 0 { QMPoly::constant(1, CycQ::one()).unwrap() } else { QMPoly::generator(1, 0).unwrap().mul(&random_level_one(&mut rng, (w - 2) as u32, 0)).unwrap() };
                if bump.is_zero() {
                    continue;
                }
                tuple[j] = tuple[j].add(&bump).unwrap();
                let bad = equivalence_conditions(&tuple, DEFAULT_MARGIN).unwrap();
                assert_eq!(bad, [false; 3], "k={k} p={p}");
            }
        }
    }

    #[test]
    fn literal_e2_shift_is_not_closed() {
        // (𝔾₂, δ𝔾₂): g₂ + 2(D+𝕖₂)g₀ keeps a 𝔾₂ term, while D+𝔾₂ cancels it
        let g2 = QMPoly::generator(1, 0).unwrap();
        let g0 = g2.delta();
        let e2 = e2_quasi_poly(1).unwrap();
        let with_e2 = g0.d_tau(DEFAULT_MARGIN).unwrap().add(&e2.mul(&g0).unwrap()).unwrap();
        let lit = g2.add(&with_e2.scale(&CycQ::from_int(2))).unwrap();
        assert_eq!(lit.depth(), 1);
        let with_g2 = g0.d_tau(DEFAULT_MARGIN).unwrap().add(&g2.mul(&g0).unwrap()).unwrap();
        assert!(g2.add(&with_g2.scale(&CycQ::from_int(2))).unwrap().is_zero());
    }
}
