//! Fourier expansions Σ c_r(q) ζ^r of elliptic functions, the slash action of
//! rational lattice translates, and conversion to jets.

use crate::cyclotomic::{cyc_root, CycQ};
use crate::field::{factorial, rat, rat_int, Rat};
use crate::jet::{Jet, Shape};
use crate::qseries::{euler_product, QSeries};
use crate::wseries::WSeries;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FourierError {
    #[error("shifted support leaves the ζ-window")]
    WindowOverflow,
    #[error("declared poles cannot be cleared: {0}")]
    NonOrthogonalPoles(String),
    #[error("matrix is not in SL2(Z)")]
    NotUnimodular,
}

/// A lattice translate X = (λ, μ) with one row per elliptic variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Translate {
    pub lambda: Vec<Rat>,
    pub mu: Vec<Rat>,
}

impl Translate {
    pub fn new(lambda: Vec<Rat>, mu: Vec<Rat>) -> Self {
        assert_eq!(lambda.len(), mu.len());
        Translate { lambda, mu }
    }

    /// Rank-1 translate (λ, μ).
    pub fn single(lambda: Rat, mu: Rat) -> Self {
        Translate { lambda: vec![lambda], mu: vec![mu] }
    }

    pub fn zero(n: usize) -> Self {
        Translate { lambda: vec![Rat::zero(); n], mu: vec![Rat::zero(); n] }
    }

    pub fn add(&self, other: &Translate) -> Translate {
        Translate {
            lambda: self.lambda.iter().zip(&other.lambda).map(|(a, b)| a + b).collect(),
            mu: self.mu.iter().zip(&other.mu).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn neg(&self) -> Translate {
        Translate { lambda: self.lambda.iter().map(|a| -a).collect(), mu: self.mu.iter().map(|a| -a).collect() }
    }

    /// X·γ for γ = (a b; c d): (aλ + cμ, bλ + dμ).
    pub fn act(&self, g: [[i64; 2]; 2]) -> Translate {
        let [[a, b], [c, d]] = g;
        let lin = |x: i64, y: i64| -> Vec<Rat> {
            self.lambda.iter().zip(&self.mu).map(|(l, m)| l * rat_int(x) + m * rat_int(y)).collect()
        };
        Translate { lambda: lin(a, c), mu: lin(b, d) }
    }

    pub fn is_integral(&self) -> bool {
        self.lambda.iter().chain(&self.mu).all(|x| x.is_integer())
    }
}

/// B_M(x, y) = xᵀ M y.
pub fn bilinear(m: &[Vec<Rat>], x: &[Rat], y: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            acc += xi * &m[i][j] * yj;
        }
    }
    acc
}

/// ρ(X) = e(B(λ,λ) − B(λ,μ) + B(μ,μ)).
pub fn rho(x: &Translate, m: &[Vec<Rat>]) -> CycQ {
    let (l, u) = (&x.lambda, &x.mu);
    cyc_root(&(bilinear(m, l, l) - bilinear(m, l, u) + bilinear(m, u, u)))
}

/// ζ_{X,X'} = e(B(λ',μ) − B(λ,μ')).
pub fn zeta_pair(x: &Translate, xp: &Translate, m: &[Vec<Rat>]) -> CycQ {
    cyc_root(&(bilinear(m, &xp.lambda, &x.mu) - bilinear(m, &x.lambda, &xp.mu)))
}

/// Whether γ lies in Γ_X: Xγ − X integral and ρ(X − Xγ) = ζ_{X, Xγ−X}.
pub fn gamma_x_member(x: &Translate, g: [[i64; 2]; 2], m: &[Vec<Rat>]) -> Result<bool, FourierError> {
    if g[0][0] * g[1][1] - g[0][1] * g[1][0] != 1 {
        return Err(FourierError::NotUnimodular);
    }
    let xg = x.act(g);
    let diff = xg.add(&x.neg());
    if !diff.is_integral() {
        return Ok(false);
    }
    Ok(rho(&x.add(&xg.neg()), m) == zeta_pair(x, &diff, m))
}

/// Σ_r c_r(q) ζ^r where every q-exponent below `trunc` is present.
///
/// `clear` > 0 (rank 1 only) means the represented function is this sum
/// divided by (ζ^{1/2} − ζ^{−1/2})^clear, which is how the trigonometric pole
/// at z = 0 of A and E₂ is carried.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierForm {
    rank: usize,
    terms: BTreeMap<Vec<Rat>, QSeries>,
    trunc: Rat,
    window: Rat,
    pub weight: Rat,
    pub index: Vec<Vec<Rat>>,
    disc_floor: Option<Rat>,
    clear: u32,
}

fn max_abs(terms: &BTreeMap<Vec<Rat>, QSeries>) -> Rat {
    terms.keys().flat_map(|r| r.iter().map(|x| x.abs())).fold(Rat::zero(), |a, b| if b > a { b } else { a })
}

impl FourierForm {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn trunc(&self) -> &Rat {
        &self.trunc
    }

    pub fn window(&self) -> &Rat {
        &self.window
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Rat>, &QSeries)> {
        self.terms.iter()
    }

    pub fn coeff(&self, r: &[Rat]) -> QSeries {
        self.terms.get(r).cloned().unwrap_or_else(QSeries::zero).truncate(&self.trunc)
    }

    fn with_terms(&self, terms: BTreeMap<Vec<Rat>, QSeries>, trunc: Rat) -> FourierForm {
        let mut terms = terms;
        for c in terms.values_mut() {
            *c = c.truncate(&trunc);
        }
        terms.retain(|_, c| !c.is_zero());
        FourierForm { terms, trunc, ..self.clone() }
    }

    /// θ(τ, z) = Σ_{ν ∈ ℤ+1/2} (−1)^⌊ν⌋ ζ^ν q^{ν²/2}, all terms with ν²/2 < t.
    pub fn theta(t: &Rat) -> FourierForm {
        let mut terms = BTreeMap::new();
        let mut k = 0i64;
        loop {
            let nu = rat(2 * k + 1, 2);
            let e = &nu * &nu / rat_int(2);
            if &e >= t {
                break;
            }
            for v in [nu.clone(), -nu.clone()] {
                let sign = if v.floor().to_integer() % BigInt::from(2) == BigInt::zero() { 1 } else { -1 };
                terms.insert(vec![v], QSeries::monomial(&e, CycQ::from_int(sign)));
            }
            k += 1;
        }
        let window = max_abs(&terms) + rat_int(4);
        FourierForm {
            rank: 1,
            terms,
            trunc: t.clone(),
            window,
            weight: rat(1, 2),
            index: vec![vec![rat(1, 2)]],
            disc_floor: Some(Rat::zero()),
            clear: 0,
        }
    }

    /// Θ = θ/η³, normalized so that its jet is Θ̂.
    pub fn big_theta(t: &Rat) -> FourierForm {
        let th = FourierForm::theta(&(t + rat(1, 8)));
        let n = t.ceil().to_integer().try_into().unwrap_or(0i64) + 1;
        let eta3_inv = euler_product(n).pow(3).invert().expect("η has unit lead").shift(&rat(-1, 8));
        let terms = th.terms.iter().map(|(r, c)| (r.clone(), c.mul(&eta3_inv))).collect();
        let mut out = th.with_terms(terms, t.clone());
        out.weight = rat_int(-1);
        out.disc_floor = Some(rat(1, 8));
        out
    }

    /// Â carried as ½(ζ^{1/2}+ζ^{−1/2}) − s·Σ_{n,d≥1}(ζ^d − ζ^{−d})q^{nd}, divided by s = ζ^{1/2} − ζ^{−1/2}.
    pub fn a_hat(t: i64) -> FourierForm {
        let mut terms: BTreeMap<Vec<Rat>, QSeries> = BTreeMap::new();
        let mut push = |r: Rat, c: QSeries| {
            let slot = terms.entry(vec![r]).or_insert_with(QSeries::zero);
            *slot = slot.add(&c);
        };
        push(rat(1, 2), QSeries::constant(CycQ::from_rat(rat(1, 2))));
        push(rat(-1, 2), QSeries::constant(CycQ::from_rat(rat(1, 2))));
        for nn in 1..t {
            for d in 1..t {
                if nn * d >= t {
                    break;
                }
                let q = |c: i64| QSeries::monomial(&rat_int(nn * d), CycQ::from_int(c));
                let dr = rat_int(d);
                // −s·(ζ^d − ζ^{−d})
                push(&dr + rat(1, 2), q(-1));
                push(&dr - rat(1, 2), q(1));
                push(-&dr + rat(1, 2), q(1));
                push(-&dr - rat(1, 2), q(-1));
            }
        }
        let window = max_abs(&terms) + rat_int(4);
        FourierForm {
            rank: 1,
            terms,
            trunc: rat_int(t),
            window,
            weight: rat_int(1),
            index: vec![vec![Rat::zero()]],
            disc_floor: None,
            clear: 1,
        }
        .with_terms_self(rat_int(t))
    }

    /// Ê₂ = Σ_{n∈ℤ} ζq^n/(1 − ζq^n)², carried as 1 + s²·Σ_{N≥1} q^N Σ_{d|N} d(ζ^d + ζ^{−d}) over s².
    pub fn e2_hat(t: i64) -> FourierForm {
        let mut terms: BTreeMap<Vec<Rat>, QSeries> = BTreeMap::new();
        let mut push = |r: Rat, c: QSeries| {
            let slot = terms.entry(vec![r]).or_insert_with(QSeries::zero);
            *slot = slot.add(&c);
        };
        push(Rat::zero(), QSeries::one());
        for nn in 1..t {
            for d in 1..=nn {
                if nn % d != 0 {
                    continue;
                }
                let q = |c: i64| QSeries::monomial(&rat_int(nn), CycQ::from_int(c * d));
                for sgn in [1, -1] {
                    let r = rat_int(sgn * d);
                    // s² = ζ − 2 + ζ^{−1}
                    push(&r + rat_int(1), q(1));
                    push(r.clone(), q(-2));
                    push(&r - rat_int(1), q(1));
                }
            }
        }
        let window = max_abs(&terms) + rat_int(4);
        FourierForm {
            rank: 1,
            terms,
            trunc: rat_int(t),
            window,
            weight: rat_int(2),
            index: vec![vec![Rat::zero()]],
            disc_floor: None,
            clear: 2,
        }
        .with_terms_self(rat_int(t))
    }

    /// A finite Laurent polynomial in ζ (exact in q), e.g. a single monomial.
    pub fn polynomial(terms: Vec<(Vec<Rat>, QSeries)>, trunc: Rat) -> FourierForm {
        let rank = terms.first().map(|(r, _)| r.len()).unwrap_or(1);
        let mut map: BTreeMap<Vec<Rat>, QSeries> = BTreeMap::new();
        for (r, c) in terms {
            let slot = map.entry(r).or_insert_with(QSeries::zero);
            *slot = slot.add(&c);
        }
        let window = max_abs(&map) + rat_int(4);
        FourierForm {
            rank,
            terms: map,
            trunc: trunc.clone(),
            window,
            weight: Rat::zero(),
            index: vec![vec![Rat::zero(); rank]; rank],
            disc_floor: None,
            clear: 0,
        }
        .with_terms_self(trunc)
    }

    fn with_terms_self(self, trunc: Rat) -> FourierForm {
        let terms = self.terms.clone();
        self.with_terms(terms, trunc)
    }

    /// Multiply every coefficient by a q-series (lowering the truncation accordingly).
    pub fn mul_q(&self, s: &QSeries) -> FourierForm {
        let terms: BTreeMap<Vec<Rat>, QSeries> = self.terms.iter().map(|(r, c)| (r.clone(), c.mul(s))).collect();
        let shift = s.valuation().unwrap_or_else(Rat::zero);
        let trunc = match s.trunc() {
            Some(st) => {
                let floor = self.terms.values().filter_map(|c| c.valuation()).min().unwrap_or_else(Rat::zero);
                let a = &self.trunc + &shift;
                let b = st + floor;
                if a < b { a } else { b }
            }
            None => &self.trunc + &shift,
        };
        self.with_terms(terms, trunc)
    }

    /// Value at ζ = e(a), as a q-series.
    pub fn specialize(&self, a: &[Rat]) -> Result<QSeries, FourierError> {
        if self.clear > 0 {
            return Err(FourierError::NonOrthogonalPoles("specializing a form with a cleared pole".into()));
        }
        let mut acc = QSeries::big_o(self.trunc.clone());
        for (r, c) in &self.terms {
            let phase: Rat = r.iter().zip(a).map(|(x, y)| x * y).sum();
            acc = acc.add(&c.scale(&cyc_root(&phase)));
        }
        Ok(acc)
    }

    /// φ|_M X = e(B(λ+μ, λ+μ)) e(B(λ, λτ + 2z)) φ(z + λτ + μ).
    pub fn slash(&self, x: &Translate) -> Result<FourierForm, FourierError> {
        if self.clear > 0 {
            return Err(FourierError::NonOrthogonalPoles("slash of a form with a cleared pole".into()));
        }
        let m = &self.index;
        let n = self.rank;
        let lam = &x.lambda;
        let lambda_zero = lam.iter().all(|l| l.is_zero());
        let trunc = if lambda_zero {
            self.trunc.clone()
        } else {
            self.shifted_trunc(lam)?
        };
        let lm = &x.lambda.iter().zip(&x.mu).map(|(a, b)| a + b).collect::<Vec<_>>();
        let pref = cyc_root(&bilinear(m, lm, lm));
        let q_shift = bilinear(m, lam, lam);
        let two_m_lam: Vec<Rat> = (0..n).map(|i| (0..n).map(|j| &m[i][j] * &lam[j]).sum::<Rat>() * rat_int(2)).collect();
        let mut terms: BTreeMap<Vec<Rat>, QSeries> = BTreeMap::new();
        for (r, c) in &self.terms {
            let phase: Rat = r.iter().zip(&x.mu).map(|(a, b)| a * b).sum();
            let qs: Rat = r.iter().zip(lam).map(|(a, b)| a * b).sum::<Rat>() + &q_shift;
            let r2: Vec<Rat> = r.iter().zip(&two_m_lam).map(|(a, b)| a + b).collect();
            let c2 = c.shift(&qs).scale(&(&pref * &cyc_root(&phase)));
            if r2.iter().any(|v| v.abs() > self.window) {
                return Err(FourierError::WindowOverflow);
            }
            if c2.truncate(&trunc).is_zero() {
                continue;
            }
            terms.insert(r2, c2);
        }
        Ok(self.with_terms(terms, trunc))
    }

    /// Largest q-order still complete after z ↦ z + λτ, from the discriminant floor.
    fn shifted_trunc(&self, lam: &[Rat]) -> Result<Rat, FourierError> {
        if self.rank != 1 {
            return Err(FourierError::WindowOverflow);
        }
        let m = &self.index[0][0];
        let c = self.disc_floor.clone().ok_or(FourierError::WindowOverflow)?;
        if !m.is_positive() {
            return Err(FourierError::WindowOverflow);
        }
        let l = lam[0].abs();
        let t = &self.trunc;
        let ml2 = m * &l * &l;
        // missing terms have s ≥ t and r² ≤ 4m(s + C); their new exponent is ≥ s − |λ|√(4m(s+C)) + mλ²
        if t + &c < ml2 {
            return Ok(-c);
        }
        let a = t + &ml2;
        let rhs = &l * &l * rat_int(4) * m * (t + &c);
        let den = BigInt::from(self.denominator() * 8);
        let mut k = (&a * Rat::from_integer(den.clone())).floor().to_integer();
        loop {
            let x = Rat::new(k.clone(), den.clone());
            let gap = &a - &x;
            if !gap.is_negative() && &gap * &gap >= rhs {
                return Ok(x);
            }
            k -= 1;
        }
    }

    fn denominator(&self) -> u64 {
        self.terms.values().fold(1u64, |d, c| num_integer::lcm(d, c.denom()))
    }

    /// The jet Σ_r c_r Π_i e^{r_i w_i} (divided by the cleared sine power), box-truncated at `j` per variable.
    pub fn to_jet(&self, j: i64) -> Result<Jet, FourierError> {
        if self.clear > 0 && self.rank != 1 {
            return Err(FourierError::NonOrthogonalPoles("cleared poles need rank 1".into()));
        }
        let extra = self.clear as i64;
        let jj = j + extra;
        let n = self.rank;
        let mut acc: BTreeMap<Vec<i64>, QSeries> = BTreeMap::new();
        let exps: Vec<Vec<i64>> = box_exponents(n, jj);
        let fact: Vec<Rat> = (0..jj).map(|k| Rat::new(BigInt::one(), factorial(k as u64))).collect();
        for (r, c) in &self.terms {
            for e in &exps {
                let mut w = Rat::one();
                for (ri, &ei) in r.iter().zip(e) {
                    w *= num_traits::pow(ri.clone(), ei as usize) * &fact[ei as usize];
                }
                if w.is_zero() {
                    continue;
                }
                let slot = acc.entry(e.clone()).or_insert_with(QSeries::zero);
                *slot = slot.add(&c.scale_rat(&w));
            }
        }
        let trunc = self.trunc.clone();
        let terms = acc.into_iter().map(|(e, c)| (e, c.add(&QSeries::big_o(trunc.clone()))));
        let num = Jet::from_terms(n, Shape::Box, vec![jj; n], terms);
        if self.clear == 0 {
            return Ok(num);
        }
        // s = e^{w/2} − e^{−w/2} = 2 sinh(w/2)
        let sine: Vec<QSeries> = (0..jj + 2 * extra + 2)
            .map(|k| {
                if k % 2 == 1 {
                    QSeries::constant(CycQ::from_rat(rat(1, 1) / (Rat::from_integer(factorial(k as u64)) * num_traits::pow(rat_int(2), k as usize - 1))))
                } else {
                    QSeries::zero()
                }
            })
            .collect();
        let s_inv = WSeries::new(0, sine).pow(self.clear).invert().expect("sine has unit lead");
        let s_jet = Jet::univariate(1, Shape::Box, 0, &s_inv);
        Ok(num.mul(&s_jet).restrict(&[j]))
    }

    /// Rank-1 jet as a univariate series.
    pub fn to_wseries(&self, j: i64) -> Result<WSeries, FourierError> {
        assert_eq!(self.rank, 1);
        let jet = self.to_jet(j)?;
        let lo = jet.terms().map(|(e, _)| e[0]).min().unwrap_or(0).min(-(self.clear as i64));
        let trunc = jet.hi()[0].min(j);
        let coeffs = (lo..trunc)
            .map(|e| jet.coeff(&[e]).unwrap_or_else(|_| QSeries::zero()).add(&QSeries::big_o(self.trunc.clone())))
            .collect();
        Ok(WSeries::new(lo, coeffs))
    }
}

fn box_exponents(n: usize, j: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for base in &out {
            for k in 0..j {
                let mut v: Vec<i64> = base.clone();
                v.push(k);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::e2_quasi;
    use crate::kernels::{a_hat, e_hat, theta_hat};

    fn half() -> Rat {
        rat(1, 2)
    }

    #[test]
    fn theta_terms() {
        let th = FourierForm::theta(&rat_int(3));
        assert_eq!(th.coeff(&[half()]), QSeries::monomial(&rat(1, 8), CycQ::one()).truncate_int(3));
        assert_eq!(th.coeff(&[-half()]), QSeries::monomial(&rat(1, 8), CycQ::from_int(-1)).truncate_int(3));
        assert_eq!(th.terms().count(), 4);
    }

    #[test]
    fn theta_jet_is_eta_cubed_times_theta_hat() {
        let t = 6;
        let th = FourierForm::theta(&rat_int(t)).to_wseries(6).unwrap();
        let eta3 = th.coeff(1);
        assert_eq!(eta3.coeff(&rat(1, 8)).unwrap(), CycQ::one());
        assert_eq!(eta3.coeff(&rat(9, 8)).unwrap(), CycQ::from_int(-3));
        let expected = theta_hat(t, 6).mul_q(&eta3);
        assert!(th.eq_common(&expected));
        let big = FourierForm::big_theta(&rat_int(t)).to_wseries(6).unwrap();
        assert!(big.eq_common(&theta_hat(t, 6)));
        assert_eq!(big.coeff(3).trunc(), Some(&rat_int(t)));
    }

    #[test]
    fn theta_at_half() {
        let t = 6;
        let v = FourierForm::big_theta(&rat_int(t)).specialize(&[half()]).unwrap();
        let mut prod = QSeries::one();
        for n in 1..t {
            let plus = QSeries::one().add(&QSeries::monomial(&rat_int(n), CycQ::one()));
            prod = prod.mul(&plus).mul(&plus);
        }
        let e = euler_product(t);
        let expected = prod.mul(&e.mul(&e).invert().unwrap()).scale(&(cyc_root(&rat(1, 4)) - cyc_root(&rat(-1, 4)))).truncate_int(t);
        assert!(v.eq_to_order(&expected, &rat_int(t)).unwrap());
    }

    #[test]
    fn kernel_fourier_matches_jets() {
        let a = FourierForm::a_hat(6).to_wseries(6).unwrap();
        assert!(a.eq_common(&a_hat(6, 6)));
        assert_eq!(a.coeff(1).trunc(), Some(&rat_int(6)));
        let e2 = FourierForm::e2_hat(6).to_wseries(6).unwrap();
        assert!(e2.eq_common(&e_hat(2, 6, 6)));
        assert_eq!(e2.coeff(0), e2_quasi(6).neg());
    }

    #[test]
    fn monomial_to_jet() {
        let f = FourierForm::polynomial(vec![(vec![rat_int(1)], QSeries::one())], rat_int(4));
        let j = f.to_wseries(5).unwrap();
        for k in 0..5 {
            assert_eq!(j.coeff(k).truncate_int(4), QSeries::constant(CycQ::from_rat(Rat::new(BigInt::one(), factorial(k as u64)))).truncate_int(4));
        }
        let one = FourierForm::polynomial(vec![(vec![rat_int(0)], QSeries::one())], rat_int(4));
        assert!(one.to_wseries(3).unwrap().eq_common(&WSeries::monomial(0, QSeries::one(), 3)));
    }

    #[test]
    fn rho_and_gamma_x() {
        let m = vec![vec![half()]];
        assert_eq!(rho(&Translate::single(rat_int(1), rat_int(0)), &m), CycQ::from_int(-1));
        let x = Translate::single(rat_int(0), half());
        assert!(gamma_x_member(&x, [[1, 0], [0, 1]], &m).unwrap());
        assert!(gamma_x_member(&x, [[1, 1], [0, 1]], &m).unwrap());
        assert!(!gamma_x_member(&x, [[0, -1], [1, 0]], &m).unwrap());
        assert_eq!(gamma_x_member(&x, [[2, 0], [0, 1]], &m), Err(FourierError::NotUnimodular));
    }

    #[test]
    fn theta_quasi_periodicity() {
        let th = FourierForm::theta(&rat_int(8));
        let m = th.index.clone();
        let x = Translate::single(rat_int(1), rat_int(0));
        let s = th.slash(&x).unwrap();
        // the slash by an integral translate fixes θ, so ρ(−X)·θ|X = −θ
        assert_eq!(s.terms, th.with_terms(th.terms.clone(), s.trunc.clone()).terms);
        assert_eq!(rho(&x.neg(), &m), CycQ::from_int(-1));
        let pure = th.slash(&Translate::single(rat_int(0), half())).unwrap();
        assert_eq!(pure.trunc(), th.trunc());
    }

    #[test]
    fn slash_composition_cocycle() {
        let grid = [rat_int(0), half(), rat_int(1)];
        for form in [FourierForm::theta(&rat_int(10)), FourierForm::big_theta(&rat_int(10))] {
            let m = form.index.clone();
            for l1 in &grid {
                for m1 in &grid {
                    for l2 in &grid {
                        for m2 in &grid {
                            let x = Translate::single(l1.clone(), m1.clone());
                            let xp = Translate::single(l2.clone(), m2.clone());
                            let lhs = form.slash(&x).unwrap().slash(&xp).unwrap();
                            let rhs = form.slash(&x.add(&xp)).unwrap();
                            // φ|X|X' = e(2B(λ,μ') − 2B(λ+μ, λ'+μ'))·φ|(X+X')
                            let lm: Vec<Rat> = vec![l1 + m1];
                            let lmp: Vec<Rat> = vec![l2 + m2];
                            let c = cyc_root(&(bilinear(&m, std::slice::from_ref(l1), std::slice::from_ref(m2)) * rat_int(2) - bilinear(&m, &lm, &lmp) * rat_int(2)));
                            let t = if lhs.trunc() < rhs.trunc() { lhs.trunc().clone() } else { rhs.trunc().clone() };
                            assert!(t > rat_int(2), "order collapsed to {t}");
                            let keys: std::collections::BTreeSet<&Vec<Rat>> = lhs.terms.keys().chain(rhs.terms.keys()).collect();
                            for r in keys {
                                let a = lhs.coeff(r).truncate(&t);
                                let b = rhs.coeff(r).scale(&c).truncate(&t);
                                assert_eq!(a, b, "X=({l1},{m1}) X'=({l2},{m2}) r={r:?}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn window_overflow() {
        let th = FourierForm::theta(&rat_int(2));
        assert_eq!(th.slash(&Translate::single(rat_int(20), rat_int(0))).err(), Some(FourierError::WindowOverflow));
        let two = FourierForm::polynomial(vec![(vec![rat_int(0), rat_int(1)], QSeries::one())], rat_int(3));
        assert!(two.slash(&Translate::new(vec![rat_int(0), rat_int(0)], vec![half(), rat_int(0)])).is_ok());
        assert_eq!(two.slash(&Translate::new(vec![half(), rat_int(0)], vec![rat_int(0), rat_int(0)])).err(), Some(FourierError::WindowOverflow));
    }
}
