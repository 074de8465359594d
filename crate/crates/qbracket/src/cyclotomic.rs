//! Elements of cyclotomic fields Q(zeta_M) with exact rational coordinates.
//!
//! Values are stored in the power basis 1, z, ..., z^(phi(M)-1) reduced modulo the
//! cyclotomic polynomial, so a fixed modulus gives a unique representation. Values
//! that happen to be rational are always demoted to modulus 1; mixed-modulus
//! arithmetic lifts both sides into Q(zeta_lcm).

use crate::field::{fmt_rat, parse_rat, Field, Rat};
use crate::linalg::{solve, Solution};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

fn phi_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (low degree first) of the n-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<i64>> {
    if let Some(p) = phi_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Phi_d with d | n, d < n.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let div = cyclotomic_poly(d);
            num = exact_div(&num, &div);
        }
    }
    let p = Arc::new(num);
    phi_cache().lock().unwrap().insert(n, p.clone());
    p
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut quo = vec![0i64; nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = rem[i + dd];
        quo[i] = c;
        for j in 0..=dd {
            rem[i + j] -= c * den[j];
        }
    }
    quo
}

pub fn euler_phi(n: u64) -> usize {
    cyclotomic_poly(n).len() - 1
}

/// An element of Q(zeta_M).
#[derive(Clone, Debug)]
pub struct CycQ {
    modulus: u64,
    coeffs: Vec<Rat>,
}

impl CycQ {
    pub fn zero() -> Self {
        CycQ { modulus: 1, coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        let mut c = CycQ { modulus: 1, coeffs: vec![r] };
        c.trim();
        c
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(Rat::from_integer(BigInt::from(n)))
    }

    /// Build from arbitrary exponent/coefficient pairs of zeta_M (exponents reduced mod M).
    pub fn from_terms(modulus: u64, terms: &[(i64, Rat)]) -> Self {
        assert!(modulus >= 1);
        let mut poly = vec![Rat::zero(); modulus as usize];
        for (e, c) in terms {
            let e = e.rem_euclid(modulus as i64) as usize;
            poly[e] += c;
        }
        Self::from_poly(modulus, poly)
    }

    fn from_poly(modulus: u64, mut poly: Vec<Rat>) -> Self {
        reduce_mod_phi(&mut poly, &cyclotomic_poly(modulus));
        let mut c = CycQ { modulus, coeffs: poly };
        c.trim();
        c
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.len() <= 1 {
            self.modulus = 1;
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Power-basis coordinates (length at most phi(modulus)).
    pub fn coords(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn to_rat(&self) -> Option<Rat> {
        match self.coeffs.len() {
            0 => Some(Rat::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// Re-express in Q(zeta_target); requires modulus | target.
    pub fn lift(&self, target: u64) -> CycQ {
        assert!(target.is_multiple_of(self.modulus), "cannot lift {} into {}", self.modulus, target);
        if self.coeffs.len() <= 1 || target == self.modulus {
            return self.clone();
        }
        let step = (target / self.modulus) as usize;
        let mut poly = vec![Rat::zero(); (self.coeffs.len() - 1) * step + 1];
        for (e, c) in self.coeffs.iter().enumerate() {
            poly[e * step] = c.clone();
        }
        Self::from_poly(target, poly)
    }

    fn lifted_coords(&self, target: u64) -> Vec<Rat> {
        let mut v = if self.coeffs.len() <= 1 {
            self.coeffs.clone()
        } else {
            self.lift(target).coeffs
        };
        v.resize(euler_phi(target), Rat::zero());
        v
    }

    /// Express the value inside Q(zeta_d) for d | modulus, if it lies there.
    pub fn try_reduce_to(&self, d: u64) -> Option<CycQ> {
        if self.coeffs.len() <= 1 {
            return Some(self.clone());
        }
        let m = self.modulus;
        let big = m.lcm(&d);
        let cols: Vec<Vec<Rat>> = (0..euler_phi(d))
            .map(|e| CycQ::from_terms(d, &[(e as i64, Rat::one())]).lifted_coords(big))
            .collect();
        let rows = euler_phi(big);
        let a: Vec<Vec<Rat>> = (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        let b = self.lifted_coords(big);
        match solve(&a, &b) {
            Solution::Unique(x) => {
                let terms: Vec<(i64, Rat)> = x.into_iter().enumerate().map(|(e, c)| (e as i64, c)).collect();
                Some(CycQ::from_terms(d, &terms))
            }
            _ => None,
        }
    }

    /// Whether the value lies in Q(zeta_d).
    pub fn lies_in(&self, d: u64) -> bool {
        self.try_reduce_to(d).is_some()
    }

    /// Smallest modulus dividing the current one that still contains the value.
    pub fn minimal_modulus(&self) -> u64 {
        let m = self.modulus;
        let mut divisors: Vec<u64> = (1..=m).filter(|d| m.is_multiple_of(*d)).collect();
        divisors.sort_unstable();
        divisors.into_iter().find(|&d| self.lies_in(d)).unwrap_or(m)
    }

    fn binary(&self, other: &CycQ, f: impl Fn(&Rat, &Rat) -> Rat) -> CycQ {
        let m = common_modulus(self, other);
        let a = self.lifted_coords(m);
        let b = other.lifted_coords(m);
        let coeffs = a.iter().zip(&b).map(|(x, y)| f(x, y)).collect();
        let mut c = CycQ { modulus: m, coeffs };
        c.trim();
        c
    }

    pub fn scale(&self, r: &Rat) -> CycQ {
        if r.is_zero() {
            return CycQ::zero();
        }
        CycQ { modulus: self.modulus, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn mul_ref(&self, other: &CycQ) -> CycQ {
        if self.is_zero() || other.is_zero() {
            return CycQ::zero();
        }
        if self.coeffs.len() == 1 {
            return other.scale(&self.coeffs[0]);
        }
        if other.coeffs.len() == 1 {
            return self.scale(&other.coeffs[0]);
        }
        let m = common_modulus(self, other);
        let a = self.lift(m);
        let b = other.lift(m);
        let mut poly = vec![Rat::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    poly[i + j] += x * y;
                }
            }
        }
        Self::from_poly(m, poly)
    }

    pub fn pow(&self, mut e: u64) -> CycQ {
        let mut base = self.clone();
        let mut acc = CycQ::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            e >>= 1;
        }
        acc
    }

    /// Integer power, negative exponents via the inverse.
    pub fn powi(&self, e: i64) -> CycQ {
        if e >= 0 {
            self.pow(e as u64)
        } else {
            self.inverse().expect("power of zero").pow((-e) as u64)
        }
    }

    /// Multiplicative inverse by solving the multiplication-matrix system.
    pub fn inverse(&self) -> Option<CycQ> {
        if self.is_zero() {
            return None;
        }
        if self.coeffs.len() == 1 {
            return Some(CycQ::from_rat(self.coeffs[0].recip()));
        }
        let m = self.modulus;
        let n = euler_phi(m);
        let columns: Vec<Vec<Rat>> = (0..n)
            .map(|e| self.mul_ref(&CycQ::from_terms(m, &[(e as i64, Rat::one())])).lifted_coords(m))
            .collect();
        let a: Vec<Vec<Rat>> = (0..n).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
        let mut b = vec![Rat::zero(); n];
        b[0] = Rat::one();
        match solve(&a, &b) {
            Solution::Unique(x) => {
                let terms: Vec<(i64, Rat)> = x.into_iter().enumerate().map(|(e, c)| (e as i64, c)).collect();
                Some(CycQ::from_terms(m, &terms))
            }
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let vec: Vec<Value> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| json!([e.to_string(), fmt_rat(c)]))
            .collect();
        json!({"modulus": self.modulus, "vec": vec})
    }

    pub fn from_json(v: &Value) -> Option<CycQ> {
        let modulus = v.get("modulus")?.as_u64()?;
        if modulus == 0 {
            return None;
        }
        let mut terms = Vec::new();
        for pair in v.get("vec")?.as_array()? {
            let pair = pair.as_array()?;
            let e: i64 = pair.first()?.as_str()?.parse().ok()?;
            let c = parse_rat(pair.get(1)?.as_str()?)?;
            terms.push((e, c));
        }
        Some(CycQ::from_terms(modulus, &terms))
    }
}

fn common_modulus(a: &CycQ, b: &CycQ) -> u64 {
    a.modulus.lcm(&b.modulus)
}

fn reduce_mod_phi(poly: &mut Vec<Rat>, phi: &[i64]) {
    let deg = phi.len() - 1;
    if poly.len() > deg {
        for i in (deg..poly.len()).rev() {
            if poly[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut poly[i]);
            for (j, &p) in phi.iter().enumerate().take(deg) {
                if p != 0 {
                    poly[i - deg + j] -= &c * BigInt::from(p);
                }
            }
        }
        poly.truncate(deg);
    }
}

/// The root of unity e(a) = exp(2 pi i a) for rational a.
pub fn cyc_root(a: &Rat) -> CycQ {
    let f = a - a.floor();
    let d: u64 = f.denom().try_into().expect("denominator too large");
    let p: i64 = f.numer().try_into().expect("numerator too large");
    if d % 4 == 2 && d > 2 {
        // zeta_{2m} = -zeta_m^{(m+1)/2} for odd m keeps the modulus minimal.
        let m = d / 2;
        let e = p * ((m as i64 + 1) / 2);
        let sign = if p % 2 == 0 { 1 } else { -1 };
        return CycQ::from_terms(m, &[(e, Rat::from_integer(BigInt::from(sign)))]);
    }
    CycQ::from_terms(d, &[(p, Rat::one())])
}

impl PartialEq for CycQ {
    fn eq(&self, other: &CycQ) -> bool {
        if self.modulus == other.modulus {
            return self.coeffs == other.coeffs;
        }
        if self.coeffs.len() <= 1 && other.coeffs.len() <= 1 {
            return self.coeffs == other.coeffs;
        }
        let m = common_modulus(self, other);
        self.lifted_coords(m) == other.lifted_coords(m)
    }
}

impl Eq for CycQ {}

impl From<Rat> for CycQ {
    fn from(r: Rat) -> Self {
        CycQ::from_rat(r)
    }
}

impl From<i64> for CycQ {
    fn from(n: i64) -> Self {
        CycQ::from_int(n)
    }
}

impl fmt::Display for CycQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{}", fmt_rat(c))?,
                1 => write!(f, "{}*z{}", fmt_rat(c), self.modulus)?,
                _ => write!(f, "{}*z{}^{}", fmt_rat(c), self.modulus, e)?,
            }
        }
        Ok(())
    }
}

impl Add<&CycQ> for &CycQ {
    type Output = CycQ;
    fn add(self, rhs: &CycQ) -> CycQ {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        self.binary(rhs, |a, b| a + b)
    }
}

impl Sub<&CycQ> for &CycQ {
    type Output = CycQ;
    fn sub(self, rhs: &CycQ) -> CycQ {
        if rhs.is_zero() {
            return self.clone();
        }
        self.binary(rhs, |a, b| a - b)
    }
}

impl Mul<&CycQ> for &CycQ {
    type Output = CycQ;
    fn mul(self, rhs: &CycQ) -> CycQ {
        self.mul_ref(rhs)
    }
}

impl Div<&CycQ> for &CycQ {
    type Output = CycQ;
    fn div(self, rhs: &CycQ) -> CycQ {
        self.mul_ref(&rhs.inverse().expect("division by zero"))
    }
}

impl Neg for &CycQ {
    type Output = CycQ;
    fn neg(self) -> CycQ {
        CycQ { modulus: self.modulus, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for CycQ {
    type Output = CycQ;
    fn neg(self) -> CycQ {
        -&self
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<CycQ> for CycQ {
            type Output = CycQ;
            fn $m(self, rhs: CycQ) -> CycQ { (&self).$m(&rhs) }
        }
        impl $tr<&CycQ> for CycQ {
            type Output = CycQ;
            fn $m(self, rhs: &CycQ) -> CycQ { (&self).$m(rhs) }
        }
        impl $tr<CycQ> for &CycQ {
            type Output = CycQ;
            fn $m(self, rhs: CycQ) -> CycQ { self.$m(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&CycQ> for CycQ {
    fn add_assign(&mut self, rhs: &CycQ) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&CycQ> for CycQ {
    fn sub_assign(&mut self, rhs: &CycQ) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&CycQ> for CycQ {
    fn mul_assign(&mut self, rhs: &CycQ) {
        *self = &*self * rhs;
    }
}

impl Field for CycQ {
    fn f_zero() -> Self {
        CycQ::zero()
    }
    fn f_one() -> Self {
        CycQ::one()
    }
    fn f_is_zero(&self) -> bool {
        CycQ::is_zero(self)
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
        self.inverse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, rat_int};

    #[test]
    fn phi_polys() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(euler_phi(24), 8);
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(cyc_root(&rat(1, 2)), CycQ::from_int(-1));
        assert_eq!(cyc_root(&rat(1, 3)) + cyc_root(&rat(2, 3)), CycQ::from_int(-1));
        assert_eq!(cyc_root(&rat(1, 4)).pow(2), cyc_root(&rat(1, 2)));
        assert_eq!(cyc_root(&rat(1, 6)) * cyc_root(&rat(-1, 6)), CycQ::one());
        assert_eq!(cyc_root(&rat(7, 5)), cyc_root(&rat(2, 5)));
        assert_eq!(cyc_root(&rat(1, 6)).pow(6), CycQ::one());
        assert_eq!(cyc_root(&rat(1, 6)).modulus(), 3);
    }

    #[test]
    fn mixed_moduli_equality() {
        let i4 = cyc_root(&rat(1, 4));
        let i8 = cyc_root(&rat(1, 8)).pow(2);
        assert_eq!(i4, i8);
        let lifted = i4.lift(24);
        assert_eq!(lifted.modulus(), 24);
        assert_eq!(lifted.try_reduce_to(4).unwrap().coords(), i4.coords());
        assert!(cyc_root(&rat(1, 3)).try_reduce_to(4).is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let x = &cyc_root(&rat(1, 5)) + &CycQ::from_rat(rat(3, 2));
        let y = x.inverse().unwrap();
        assert!((&x * &y).is_one());
        assert_eq!(CycQ::zero().inverse(), None);
    }

    #[test]
    fn sqrt_two_in_eighth_roots() {
        let z = cyc_root(&rat(1, 8));
        let s = &z + &cyc_root(&rat(-1, 8));
        assert_eq!(&s * &s, CycQ::from(rat_int(2)));
    }

    #[test]
    fn json_roundtrip() {
        let x = &cyc_root(&rat(1, 12)) * &CycQ::from_rat(rat(-5, 7));
        let back = CycQ::from_json(&x.to_json()).unwrap();
        assert_eq!(back.coords(), x.coords());
        assert_eq!(back.modulus(), x.modulus());
    }
}
