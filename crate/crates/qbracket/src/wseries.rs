//! Laurent series in one elliptic variable w = 2πi z with q-series coefficients.

use crate::cyclotomic::CycQ;
use crate::field::{rat_int, Rat};
use crate::qseries::{QSeries, SeriesError};
use num_bigint::BigInt;

/// Σ_{e ≥ val} c_e(q) w^e + O(w^(val + len)).
#[derive(Clone, Debug, PartialEq)]
pub struct WSeries {
    val: i64,
    coeffs: Vec<QSeries>,
}

impl WSeries {
    pub fn new(val: i64, coeffs: Vec<QSeries>) -> Self {
        WSeries { val, coeffs }
    }

    /// O(w^trunc).
    pub fn big_o(trunc: i64) -> Self {
        WSeries { val: trunc, coeffs: vec![] }
    }

    /// c w^e + O(w^trunc).
    pub fn monomial(e: i64, c: QSeries, trunc: i64) -> Self {
        let mut coeffs = vec![QSeries::zero(); (trunc - e).max(0) as usize];
        if let Some(first) = coeffs.first_mut() {
            *first = c;
        }
        WSeries { val: e, coeffs }
    }

    pub fn val(&self) -> i64 {
        self.val
    }

    /// Exponents strictly below this are known.
    pub fn trunc(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    pub fn coeff(&self, e: i64) -> QSeries {
        assert!(e < self.trunc(), "w^{e} beyond truncation w^{}", self.trunc());
        if e < self.val {
            QSeries::zero()
        } else {
            self.coeffs[(e - self.val) as usize].clone()
        }
    }

    /// (exponent, coefficient) pairs with nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &QSeries)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (self.val + i as i64, c))
    }

    pub fn truncate_w(&self, trunc: i64) -> WSeries {
        let t = trunc.min(self.trunc());
        if t <= self.val {
            return WSeries::big_o(t);
        }
        WSeries { val: self.val, coeffs: self.coeffs[..(t - self.val) as usize].to_vec() }
    }

    pub fn truncate_q(&self, t: &Rat) -> WSeries {
        self.map(|c| c.truncate(t))
    }

    pub fn map(&self, f: impl Fn(&QSeries) -> QSeries) -> WSeries {
        WSeries { val: self.val, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn add(&self, other: &WSeries) -> WSeries {
        let val = self.val.min(other.val);
        let trunc = self.trunc().min(other.trunc());
        WSeries { val, coeffs: (val..trunc).map(|e| self.coeff(e).add(&other.coeff(e))).collect() }
    }

    pub fn neg(&self) -> WSeries {
        self.map(|c| c.neg())
    }

    pub fn sub(&self, other: &WSeries) -> WSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CycQ) -> WSeries {
        self.map(|x| x.scale(c))
    }

    pub fn scale_rat(&self, r: &Rat) -> WSeries {
        self.map(|x| x.scale_rat(r))
    }

    /// Multiply every coefficient by a q-series.
    pub fn mul_q(&self, s: &QSeries) -> WSeries {
        self.map(|x| x.mul(s))
    }

    /// Multiply by w^k.
    pub fn shift(&self, k: i64) -> WSeries {
        WSeries { val: self.val + k, coeffs: self.coeffs.clone() }
    }

    pub fn mul(&self, other: &WSeries) -> WSeries {
        let val = self.val + other.val;
        let trunc = (self.trunc() + other.val).min(other.trunc() + self.val);
        let n = (trunc - val).max(0) as usize;
        let mut coeffs = vec![QSeries::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n.saturating_sub(i)) {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        WSeries { val, coeffs }
    }

    pub fn pow(&self, n: u32) -> WSeries {
        if n == 0 {
            return WSeries::monomial(0, QSeries::one(), self.trunc() - self.val);
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Leading zero coefficients are dropped so the lead is a unit q-series.
    fn normalized(&self) -> WSeries {
        let skip = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        WSeries { val: self.val + skip as i64, coeffs: self.coeffs[skip..].to_vec() }
    }

    pub fn invert(&self) -> Result<WSeries, SeriesError> {
        let s = self.normalized();
        let c = &s.coeffs;
        let lead_inv = c.first().ok_or(SeriesError::NotAUnit)?.invert()?;
        let mut b: Vec<QSeries> = Vec::with_capacity(c.len());
        for k in 0..c.len() {
            if k == 0 {
                b.push(lead_inv.clone());
                continue;
            }
            let mut acc = QSeries::zero();
            for j in 1..=k {
                if !c[j].is_zero() && !b[k - j].is_zero() {
                    acc = acc.add(&c[j].mul(&b[k - j]));
                }
            }
            b.push(acc.mul(&lead_inv).neg());
        }
        Ok(WSeries { val: -s.val, coeffs: b })
    }

    pub fn div(&self, other: &WSeries) -> Result<WSeries, SeriesError> {
        Ok(self.mul(&other.invert()?))
    }

    /// exp(P) for P with no terms below w^1.
    pub fn exp(&self) -> WSeries {
        assert!(self.terms().all(|(e, _)| e >= 1), "exp needs a series vanishing at w = 0");
        let n = self.trunc().max(0) as usize;
        let p: Vec<QSeries> = (0..n as i64).map(|e| self.coeff(e)).collect();
        let mut out: Vec<QSeries> = Vec::with_capacity(n);
        for m in 0..n {
            if m == 0 {
                out.push(QSeries::one());
                continue;
            }
            // m E_m = Σ_k k P_k E_{m−k}
            let mut acc = QSeries::zero();
            for k in 1..=m {
                if !p[k].is_zero() && !out[m - k].is_zero() {
                    acc = acc.add(&p[k].mul(&out[m - k]).scale_rat(&rat_int(k as i64)));
                }
            }
            out.push(acc.scale_rat(&Rat::new(BigInt::from(1), BigInt::from(m))));
        }
        WSeries { val: 0, coeffs: out }
    }

    /// d/dw.
    pub fn d_w(&self) -> WSeries {
        let val = self.val - 1;
        let coeffs = (self.val..self.trunc()).map(|e| self.coeff(e).scale_rat(&rat_int(e))).collect();
        WSeries { val, coeffs }
    }

    /// q d/dq on every coefficient.
    pub fn d_tau(&self) -> WSeries {
        self.map(|c| c.d_tau())
    }

    /// f(−w).
    pub fn reflect(&self) -> WSeries {
        WSeries {
            val: self.val,
            coeffs: (self.val..self.trunc())
                .map(|e| if e.rem_euclid(2) == 1 { self.coeff(e).neg() } else { self.coeff(e) })
                .collect(),
        }
    }

    /// Equality of all coefficients known on both sides.
    pub fn eq_common(&self, other: &WSeries) -> bool {
        let lo = self.val.min(other.val);
        let hi = self.trunc().min(other.trunc());
        (lo..hi).all(|e| self.coeff(e).eq_common(&other.coeff(e)))
    }
}
