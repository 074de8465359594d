//! Truncated Puiseux series in q over cyclotomic coefficients.

use crate::cyclotomic::CycQ;
use crate::field::{fmt_rat, parse_rat, rat_int, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("series is not a unit: no nonzero coefficient below the truncation order")]
    NotAUnit,
    #[error("coefficient at q^{0} requested but the series is only known below q^{1}")]
    TruncationUnderflow(String, String),
    #[error("malformed series JSON: {0}")]
    Json(String),
}

/// Σ c_e q^(e/denom) + O(q^trunc). A `None` truncation means the series is exact.
#[derive(Clone, Debug)]
pub struct QSeries {
    denom: u64,
    trunc: Option<Rat>,
    terms: BTreeMap<i64, CycQ>,
}

fn rat_key(e: &Rat, denom: u64) -> Option<i64> {
    let scaled = e * rat_int(denom as i64);
    if scaled.is_integer() {
        scaled.to_integer().try_into().ok()
    } else {
        None
    }
}

fn min_opt(a: Option<Rat>, b: Option<Rat>) -> Option<Rat> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x < y { x } else { y }),
        (x, None) => x,
        (None, y) => y,
    }
}

impl QSeries {
    pub fn zero() -> Self {
        QSeries { denom: 1, trunc: None, terms: BTreeMap::new() }
    }

    pub fn constant(c: CycQ) -> Self {
        let mut s = Self::zero();
        if !c.is_zero() {
            s.terms.insert(0, c);
        }
        s
    }

    pub fn one() -> Self {
        Self::constant(CycQ::one())
    }

    /// The exact monomial c q^e.
    pub fn monomial(e: &Rat, c: CycQ) -> Self {
        let denom: u64 = e.denom().try_into().expect("exponent denominator");
        let mut s = QSeries { denom, trunc: None, terms: BTreeMap::new() };
        if !c.is_zero() {
            s.terms.insert(rat_key(e, denom).unwrap(), c);
        }
        s
    }

    /// O(q^t): the zero series known only below t.
    pub fn big_o(t: Rat) -> Self {
        QSeries { denom: 1, trunc: Some(t), terms: BTreeMap::new() }
    }

    /// Integer-exponent series from a coefficient list starting at q^0, truncated at q^(len).
    pub fn from_coeffs(coeffs: Vec<CycQ>) -> Self {
        let t = coeffs.len() as i64;
        let mut s = QSeries { denom: 1, trunc: Some(rat_int(t)), terms: BTreeMap::new() };
        for (i, c) in coeffs.into_iter().enumerate() {
            if !c.is_zero() {
                s.terms.insert(i as i64, c);
            }
        }
        s
    }

    pub fn from_rats(coeffs: &[Rat]) -> Self {
        Self::from_coeffs(coeffs.iter().cloned().map(CycQ::from_rat).collect())
    }

    /// Build from (exponent, coefficient) pairs, accumulating repeats.
    pub fn from_terms(terms: impl IntoIterator<Item = (Rat, CycQ)>, trunc: Option<Rat>) -> Self {
        let terms: Vec<(Rat, CycQ)> = terms.into_iter().collect();
        let denom = terms.iter().fold(1u64, |d, (e, _)| {
            let ed: u64 = e.denom().try_into().expect("exponent denominator");
            d.lcm(&ed)
        });
        let mut s = QSeries { denom, trunc, terms: BTreeMap::new() };
        for (e, c) in terms {
            if s.trunc.as_ref().is_some_and(|t| &e >= t) {
                continue;
            }
            let k = rat_key(&e, denom).unwrap();
            let entry = s.terms.entry(k).or_insert_with(CycQ::zero);
            *entry += &c;
        }
        s.terms.retain(|_, c| !c.is_zero());
        s
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn trunc(&self) -> Option<&Rat> {
        self.trunc.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// Lowest stored exponent, if any.
    pub fn valuation(&self) -> Option<Rat> {
        self.terms.keys().next().map(|&k| self.exp_of(k))
    }

    /// Lower bound for every exponent the series may contain: min(valuation, trunc).
    pub fn floor(&self) -> Option<Rat> {
        min_opt(self.valuation(), self.trunc.clone())
    }

    fn exp_of(&self, key: i64) -> Rat {
        Rat::new(BigInt::from(key), BigInt::from(self.denom))
    }

    pub fn terms(&self) -> impl Iterator<Item = (Rat, &CycQ)> + '_ {
        self.terms.iter().map(move |(&k, c)| (self.exp_of(k), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// True if every known coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of q^e; fails if e is at or beyond the truncation.
    pub fn coeff(&self, e: &Rat) -> Result<CycQ, SeriesError> {
        if let Some(t) = &self.trunc {
            if e >= t {
                return Err(SeriesError::TruncationUnderflow(fmt_rat(e), fmt_rat(t)));
            }
        }
        Ok(rat_key(e, self.denom).and_then(|k| self.terms.get(&k).cloned()).unwrap_or_else(CycQ::zero))
    }

    pub fn coeff_int(&self, n: i64) -> Result<CycQ, SeriesError> {
        self.coeff(&rat_int(n))
    }

    /// Drop everything at or beyond t (t may only lower the truncation).
    pub fn truncate(&self, t: &Rat) -> QSeries {
        let t = min_opt(Some(t.clone()), self.trunc.clone()).unwrap();
        let mut s = self.clone();
        s.terms.retain(|&k, _| Rat::new(BigInt::from(k), BigInt::from(self.denom)) < t);
        s.trunc = Some(t);
        s
    }

    pub fn truncate_int(&self, t: i64) -> QSeries {
        self.truncate(&rat_int(t))
    }

    fn with_denom(&self, d: u64) -> QSeries {
        if d == self.denom {
            return self.clone();
        }
        assert!(d.is_multiple_of(self.denom));
        let f = (d / self.denom) as i64;
        QSeries { denom: d, trunc: self.trunc.clone(), terms: self.terms.iter().map(|(k, c)| (k * f, c.clone())).collect() }
    }

    /// Shrink the exponent denominator to the smallest one compatible with stored terms.
    pub fn normalize_denom(&self) -> QSeries {
        let g = self.terms.keys().fold(self.denom as i64, |g, k| g.gcd(k));
        let g = g.max(1) as u64;
        if g == 1 {
            return self.clone();
        }
        QSeries {
            denom: self.denom / g,
            trunc: self.trunc.clone(),
            terms: self.terms.iter().map(|(k, c)| (k / g as i64, c.clone())).collect(),
        }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let d = self.denom.lcm(&other.denom);
        let a = self.with_denom(d);
        let b = other.with_denom(d);
        let trunc = min_opt(a.trunc.clone(), b.trunc.clone());
        let mut terms = a.terms;
        for (k, c) in b.terms {
            let e = terms.entry(k).or_insert_with(CycQ::zero);
            *e += &c;
        }
        let mut s = QSeries { denom: d, trunc: None, terms };
        s.terms.retain(|_, c| !c.is_zero());
        match trunc {
            Some(t) => s.truncate(&t),
            None => s,
        }
    }

    pub fn neg(&self) -> QSeries {
        QSeries { denom: self.denom, trunc: self.trunc.clone(), terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CycQ) -> QSeries {
        if c.is_zero() {
            return QSeries { denom: self.denom, trunc: self.trunc.clone(), terms: BTreeMap::new() };
        }
        QSeries { denom: self.denom, trunc: self.trunc.clone(), terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect() }
    }

    pub fn scale_rat(&self, r: &Rat) -> QSeries {
        self.scale(&CycQ::from_rat(r.clone()))
    }

    /// Multiply by q^e exactly (truncation shifts too).
    pub fn shift(&self, e: &Rat) -> QSeries {
        let ed: u64 = e.denom().try_into().unwrap();
        let d = self.denom.lcm(&ed);
        let s = self.with_denom(d);
        let k = rat_key(e, d).unwrap();
        QSeries { denom: d, trunc: s.trunc.as_ref().map(|t| t + e), terms: s.terms.into_iter().map(|(j, c)| (j + k, c)).collect() }
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        let d = self.denom.lcm(&other.denom);
        let a = self.with_denom(d);
        let b = other.with_denom(d);
        let trunc = match (&a.trunc, &b.trunc) {
            (None, None) => None,
            (Some(ta), None) => b.floor().map(|fb| ta + fb),
            (None, Some(tb)) => a.floor().map(|fa| tb + fa),
            (Some(ta), Some(tb)) => {
                let x = ta + b.floor().unwrap();
                let y = tb + a.floor().unwrap();
                Some(if x < y { x } else { y })
            }
        };
        // exact empty factors still give an exact zero
        let trunc = if (a.is_exact() && a.terms.is_empty()) || (b.is_exact() && b.terms.is_empty()) { None } else { trunc };
        let limit = trunc.as_ref().map(|t| t * rat_int(d as i64));
        let mut terms: BTreeMap<i64, CycQ> = BTreeMap::new();
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                let k = ka + kb;
                if let Some(l) = &limit {
                    if rat_int(k) >= *l {
                        break;
                    }
                }
                let e = terms.entry(k).or_insert_with(CycQ::zero);
                *e += &(ca * cb);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        QSeries { denom: d, trunc, terms }
    }

    pub fn pow(&self, n: u64) -> QSeries {
        let mut acc = QSeries::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse of q^v·u with u(0) != 0; the result is known below trunc − 2v.
    pub fn invert(&self) -> Result<QSeries, SeriesError> {
        let (&k0, c0) = self.terms.iter().next().ok_or(SeriesError::NotAUnit)?;
        let c0inv = c0.inverse().ok_or(SeriesError::NotAUnit)?;
        let d = self.denom;
        let v = self.exp_of(k0);
        let Some(t) = &self.trunc else {
            if self.terms.len() == 1 {
                return Ok(QSeries::monomial(&-v, c0inv));
            }
            return Err(SeriesError::TruncationUnderflow("inverse".into(), "exact non-monomial".into()));
        };
        let rel_t = t - &v;
        let n_terms = (&rel_t * rat_int(d as i64)).ceil().to_integer();
        let n_terms: i64 = n_terms.try_into().unwrap();
        let rel: Vec<(i64, CycQ)> = self.terms.iter().skip(1).map(|(k, c)| (k - k0, c.clone())).collect();
        let mut b: Vec<CycQ> = Vec::with_capacity(n_terms.max(0) as usize);
        for n in 0..n_terms {
            if n == 0 {
                b.push(c0inv.clone());
                continue;
            }
            let mut acc = CycQ::zero();
            for (j, a) in &rel {
                if *j > n {
                    break;
                }
                let prev = &b[(n - j) as usize];
                if !prev.is_zero() {
                    acc += &(a * prev);
                }
            }
            b.push(-(&acc * &c0inv));
        }
        let terms = b.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(n, c)| (n as i64 - k0, c)).collect();
        Ok(QSeries { denom: d, trunc: Some(rel_t - &v), terms })
    }

    pub fn div(&self, other: &QSeries) -> Result<QSeries, SeriesError> {
        Ok(self.mul(&other.invert()?))
    }

    /// q ↦ q^factor on exponents (positive factor).
    pub fn rescale(&self, factor: &Rat) -> QSeries {
        assert!(factor.is_positive());
        let terms: Vec<(Rat, CycQ)> = self.terms().map(|(e, c)| (e * factor, c.clone())).collect();
        let trunc = self.trunc.as_ref().map(|t| t * factor);
        let mut s = QSeries::from_terms(terms, None);
        s.trunc = trunc;
        s
    }

    /// Exponent e ↦ e/n, i.e. the series re-read in q^(1/n).
    pub fn scale_exponents(&self, n: u64) -> QSeries {
        self.rescale(&Rat::new(BigInt::one(), BigInt::from(n))).with_denom_exact(self.denom * n)
    }

    fn with_denom_exact(&self, d: u64) -> QSeries {
        let base = self.normalize_denom();
        if d.is_multiple_of(base.denom) {
            base.with_denom(d)
        } else {
            self.clone()
        }
    }

    /// D_tau = q d/dq.
    pub fn d_tau(&self) -> QSeries {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| **k != 0)
            .map(|(k, c)| (*k, c.scale(&self.exp_of(*k))))
            .collect();
        QSeries { denom: self.denom, trunc: self.trunc.clone(), terms }
    }

    /// Equality of all coefficients below t; errors when either side is unknown there.
    pub fn eq_to_order(&self, other: &QSeries, t: &Rat) -> Result<bool, SeriesError> {
        for s in [self, other] {
            if let Some(st) = &s.trunc {
                if st < t {
                    return Err(SeriesError::TruncationUnderflow(fmt_rat(t), fmt_rat(st)));
                }
            }
        }
        Ok(self.sub(other).truncate(t).is_zero())
    }

    /// Equality up to the common truncation.
    pub fn eq_common(&self, other: &QSeries) -> bool {
        let t = min_opt(self.trunc.clone(), other.trunc.clone());
        let diff = self.sub(other);
        match t {
            Some(t) => diff.truncate(&t).is_zero(),
            None => diff.is_zero(),
        }
    }

    /// Apply a map to each coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&CycQ) -> CycQ) -> QSeries {
        let mut terms: BTreeMap<i64, CycQ> = self.terms.iter().map(|(k, c)| (*k, f(c))).collect();
        terms.retain(|_, c| !c.is_zero());
        QSeries { denom: self.denom, trunc: self.trunc.clone(), terms }
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms().map(|(e, c)| json!({"exp": fmt_rat(&e), "coeff": c.to_json()})).collect();
        json!({
            "denom": self.denom,
            "trunc": self.trunc.as_ref().map(fmt_rat),
            "terms": terms,
        })
    }

    pub fn from_json(v: &Value) -> Result<QSeries, SeriesError> {
        let bad = |m: &str| SeriesError::Json(m.to_string());
        let denom = v.get("denom").and_then(Value::as_u64).filter(|d| *d > 0).ok_or_else(|| bad("denom"))?;
        let trunc = match v.get("trunc") {
            None | Some(Value::Null) => None,
            Some(t) => Some(t.as_str().and_then(parse_rat).ok_or_else(|| bad("trunc"))?),
        };
        let mut terms = BTreeMap::new();
        for t in v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("terms"))? {
            let e = t.get("exp").and_then(Value::as_str).and_then(parse_rat).ok_or_else(|| bad("exp"))?;
            let c = t.get("coeff").and_then(CycQ::from_json).ok_or_else(|| bad("coeff"))?;
            let k = rat_key(&e, denom).ok_or_else(|| bad("exponent not in (1/denom)Z"))?;
            if !c.is_zero() {
                terms.insert(k, c);
            }
        }
        Ok(QSeries { denom, trunc, terms })
    }

    /// Comma-separated `exp,coeff` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("exp,coeff\n");
        for (e, c) in self.terms() {
            out.push_str(&format!("{},\"{}\"\n", fmt_rat(&e), c));
        }
        if let Some(t) = &self.trunc {
            out.push_str(&format!("trunc,{}\n", fmt_rat(t)));
        }
        out
    }
}

impl PartialEq for QSeries {
    /// Structural equality: same truncation and same coefficients.
    fn eq(&self, other: &QSeries) -> bool {
        self.trunc == other.trunc && self.sub(other).is_zero()
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms()
            .map(|(e, c)| {
                let cs = if c.to_rat().is_some() { c.to_string() } else { format!("({})", c) };
                if e.is_zero() {
                    cs
                } else {
                    format!("{}*q^{}", cs, fmt_rat(&e))
                }
            })
            .collect();
        if let Some(t) = &self.trunc {
            parts.push(format!("O(q^{})", fmt_rat(t)));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Euler's product ∏_{n≥1}(1 − q^n) to O(q^t) via the pentagonal number theorem.
pub fn euler_product(t: i64) -> QSeries {
    let mut coeffs = vec![CycQ::zero(); t.max(0) as usize];
    for k in 0i64.. {
        let p1 = k * (3 * k - 1) / 2;
        if p1 >= t {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        coeffs[p1 as usize] = CycQ::from_int(sign);
        if k > 0 {
            let p2 = k * (3 * k + 1) / 2;
            if p2 < t {
                coeffs[p2 as usize] = CycQ::from_int(sign);
            }
        }
    }
    QSeries::from_coeffs(coeffs)
}

/// σ_k(n) = Σ_{d|n} d^k.
pub fn sigma(k: u32, n: u64) -> BigInt {
    (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| BigInt::from(d).pow(k)).sum()
}

/// Every coefficient of the series is rational.
pub fn is_rational(s: &QSeries) -> bool {
    s.terms().all(|(_, c)| c.to_rat().is_some())
}

pub fn abs_rat(r: &Rat) -> Rat {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::cyc_root;
    use crate::field::rat;

    fn ints(v: &[i64]) -> QSeries {
        QSeries::from_coeffs(v.iter().map(|&x| CycQ::from_int(x)).collect())
    }

    #[test]
    fn geometric_inverse() {
        let s = ints(&[1, -1, 0, 0, 0, 0]);
        assert_eq!(s.invert().unwrap(), ints(&[1, 1, 1, 1, 1, 1]));
    }

    #[test]
    fn partition_counts_from_euler_product() {
        let p = euler_product(5).invert().unwrap();
        assert_eq!(p, ints(&[1, 1, 2, 3, 5]));
    }

    #[test]
    fn pentagonal_matches_product() {
        let mut prod = QSeries::one().truncate_int(20);
        for n in 1..20 {
            let f = QSeries::from_terms([(rat_int(0), CycQ::one()), (rat_int(n), CycQ::from_int(-1))], None);
            prod = prod.mul(&f);
        }
        assert_eq!(prod, euler_product(20));
    }

    #[test]
    fn truncation_bookkeeping() {
        let a = ints(&[1, 2, 3]);
        let b = QSeries::monomial(&rat_int(2), CycQ::one()).add(&QSeries::big_o(rat_int(5)));
        let p = a.mul(&b);
        assert_eq!(p.trunc(), Some(&rat_int(5)));
        assert!(p.coeff_int(5).is_err());
        assert_eq!(p.coeff_int(4).unwrap(), CycQ::from_int(3));
    }

    #[test]
    fn shifted_inverse_truncation() {
        let s = QSeries::monomial(&rat(1, 2), CycQ::from_int(2)).add(&QSeries::monomial(&rat(3, 2), CycQ::one())).truncate_int(4);
        let inv = s.invert().unwrap();
        assert_eq!(inv.trunc(), Some(&rat_int(3)));
        assert!(inv.mul(&s).eq_to_order(&QSeries::one(), &rat_int(2)).unwrap());
        assert_eq!(QSeries::big_o(rat_int(3)).invert(), Err(SeriesError::NotAUnit));
    }

    #[test]
    fn d_tau_examples() {
        let s = QSeries::monomial(&rat(3, 2), CycQ::one());
        assert_eq!(s.d_tau(), QSeries::monomial(&rat(3, 2), CycQ::from_rat(rat(3, 2))));
        assert!(QSeries::one().d_tau().is_zero());
        assert_eq!(ints(&[0, 1, 3]).d_tau(), ints(&[0, 1, 6]));
    }

    #[test]
    fn scale_exponents_halves() {
        let q = QSeries::monomial(&rat_int(1), CycQ::one());
        let s = q.scale_exponents(2);
        assert_eq!(s.denom(), 2);
        assert_eq!(s.coeff(&rat(1, 2)).unwrap(), CycQ::one());
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let s = QSeries::from_terms(
            [(rat(-1, 3), cyc_root(&rat(1, 3))), (rat(5, 6), CycQ::from_rat(rat(-7, 9)))],
            Some(rat(7, 2)),
        );
        let j = s.to_json();
        let back = QSeries::from_json(&j).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json().to_string(), j.to_string());
    }

    #[test]
    fn comparison_beyond_trunc_errors() {
        let a = ints(&[1, 2]);
        assert!(a.eq_to_order(&a, &rat_int(3)).is_err());
        assert!(a.eq_to_order(&a, &rat_int(2)).unwrap());
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(1, 6), BigInt::from(12));
        assert_eq!(sigma(3, 2), BigInt::from(9));
    }
}
