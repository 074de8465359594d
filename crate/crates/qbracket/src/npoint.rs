//! n-point functions: generating series of brackets on the partition side and
//! the elliptic kernels they equal.
//!
//! * Bloch–Okounkov: ⟨W(z_1)⋯W(z_n)⟩ with W(z) = Σ_k Q_k z^{k−1}; F_1 = 1/Θ.
//! * Moments: ⟨𝒮(z_1)⋯𝒮(z_n)⟩ with 𝒮(z) = 1/(2z²) + Σ_k S_k z^{k−2}/(k−2)!,
//!   even k only (the odd moments have no quasimodular bracket).
//! * Double moments: ⟨𝒯(z_1,w_1)⊙⋯⊙𝒯(z_n,w_n)⟩ with
//!   𝒯(z,w) = −1/(2z) − 1/(2w) + Σ_{k+l even} T_{k,l} z^k w^{l−1}/(k!(l−1)!).
//!
//! All variables are in w = 2πiz units.

use crate::bracket::{odot_all, qbrackets};
use crate::cyclotomic::{cyc_root, CycQ};
use crate::families::{Family, FamilyError, PartitionFunction};
use crate::field::{factorial, rat, rat_int, Rat};
use crate::fourier::{FourierError, FourierForm, Translate};
use crate::jet::{Jet, JetError, Shape};
use crate::qj::{bloch_okounkov_recursion, pull_back, Generator, Orders, QJ, QjError};
use crate::qseries::{QSeries, SeriesError};
use crate::wseries::WSeries;
use num_bigint::BigInt;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NPointError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Qj(#[from] QjError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("{0}")]
    Unsupported(String),
}

/// Which generating series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    BlochOkounkov,
    Moment,
    DoubleMoment,
}

/// Truncation: brackets use partitions of size ≤ q (so O(q^{q+1})), jets
/// carry exponents below `j` in each variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncs {
    pub q: u32,
    pub j: i64,
}

impl Truncs {
    pub fn q_order(&self) -> Rat {
        rat_int(self.q as i64 + 1)
    }
}

fn box_exponents(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for (l, h) in lo.iter().zip(hi) {
        out = out.into_iter().flat_map(|b: Vec<i64>| (*l..*h).map(move |x| [b.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Bracket a list of products in one sweep and assemble a box jet.
fn jet_from_products(rank: usize, lo: &[i64], hi: &[i64], items: Vec<(Vec<i64>, PartitionFunction)>, q: u32) -> Result<Jet, NPointError> {
    let (exps, fs): (Vec<Vec<i64>>, Vec<PartitionFunction>) = items.into_iter().unzip();
    let series = qbrackets(&fs, q)?;
    let mut terms: BTreeMap<Vec<i64>, QSeries> = BTreeMap::new();
    for (e, s) in exps.into_iter().zip(series) {
        terms.insert(e, s);
    }
    // from_terms infers lo from the stored terms; add explicit zeros at the box floor
    let floor = lo.to_vec();
    terms.entry(floor).or_insert_with(|| QSeries::big_o(rat_int(q as i64 + 1)));
    Ok(Jet::from_terms(rank, Shape::Box, hi.to_vec(), terms))
}

/// ⟨W(z_1; a_1)⋯W(z_n; a_n)⟩: the coefficient of Π w_i^{k_i−1} is ⟨Π Q_{k_i}(·, a_i)⟩.
pub fn bloch_okounkov_brackets(a: &[Rat], t: Truncs) -> Result<Jet, NPointError> {
    let n = a.len();
    let lo = vec![-1; n];
    let hi = vec![t.j; n];
    let mut items = Vec::new();
    for e in box_exponents(&lo, &hi) {
        let factors = e
            .iter()
            .zip(a)
            .map(|(ei, ai)| Family::qa(ei + 1, ai.clone()).function())
            .collect::<Result<Vec<_>, _>>()?;
        items.push((e, PartitionFunction::product(&factors)));
    }
    jet_from_products(n, &lo, &hi, items, t.q)
}

/// Θ(w + a) as a w-series, from the triple product: Θ|(0, a) = e(a²/2) Θ(w + a).
pub fn theta_shifted(a: &Rat, t: Truncs) -> Result<WSeries, NPointError> {
    let th = FourierForm::big_theta(&t.q_order()).slash(&Translate::single(rat_int(0), a.clone()))?;
    let fix = cyc_root(&(-(a * a) / rat_int(2)));
    Ok(th.to_wseries(t.j + 2)?.scale(&fix))
}

/// The one-point kernel 𝒆(−a/2)/Θ(w + a).
pub fn bloch_okounkov_one_point(a: &Rat, t: Truncs) -> Result<WSeries, NPointError> {
    let th = theta_shifted(a, t)?;
    let inv = th.invert()?;
    Ok(inv.scale(&cyc_root(&(-a / rat_int(2)))).truncate_w(t.j))
}

/// ⟨Q_1(·, a)⟩_q · Θ(τ, a), which should be the constant 𝒆(−a/2).
pub fn klein_product(a: &Rat, q: u32) -> Result<QSeries, NPointError> {
    let qa = qbrackets(&[Family::qa(1, a.clone()).function()?], q)?.remove(0);
    let th = FourierForm::big_theta(&rat_int(q as i64 + 1)).specialize(std::slice::from_ref(a))?;
    Ok(qa.mul(&th))
}

/// F_n from the recursion, as a box jet with simple poles.
pub fn bloch_okounkov_kernel_box(n: usize, t: Truncs) -> Result<Jet, NPointError> {
    let f = bloch_okounkov_recursion(n, t.q as i64 + 1, t.j)?;
    Ok(f.base().to_box(&vec![1; n], &vec![t.j; n])?)
}

/// ⟨𝒮(z_1)⋯𝒮(z_n)⟩ on the partition side, exponents −2 and even e ≥ 0.
pub fn moment_brackets(n: usize, t: Truncs) -> Result<Jet, NPointError> {
    let lo = vec![-2; n];
    let hi = vec![t.j; n];
    let mut items = Vec::new();
    for e in box_exponents(&lo, &hi) {
        if e.iter().any(|x| *x == -1 || x.rem_euclid(2) == 1) {
            continue;
        }
        let mut f = PartitionFunction::one();
        for &ei in &e {
            let factor = if ei == -2 {
                PartitionFunction::constant(CycQ::from_rat(rat(1, 2)))
            } else {
                let s = Family::s(ei + 2).function()?;
                let inv = Rat::new(BigInt::from(1), factorial(ei as u64));
                PartitionFunction::linear_combination(&[(CycQ::from_rat(inv), s)])
            };
            f = f.mul(&factor);
        }
        items.push((e, f));
    }
    jet_from_products(n, &lo, &hi, items, t.q)
}

/// Negate the i-th variable: z_i ↦ −z_i, ξ_i ↦ −ξ_i.
fn reflect_variable(f: &QJ, i: usize) -> QJ {
    let mut acc: Option<QJ> = None;
    for ((nu, xi), c) in f.terms() {
        let sign_xi = if xi[i] % 2 == 0 { 1 } else { -1 };
        let terms = c.terms().map(|(e, s)| {
            let sg = if e[i].rem_euclid(2) == 0 { sign_xi } else { -sign_xi };
            (e.clone(), s.scale_rat(&rat_int(sg)))
        });
        let jet = Jet::from_terms(c.rank(), c.shape(), c.hi().to_vec(), terms);
        let mut index = f.index().to_vec();
        for (r, row) in index.iter_mut().enumerate() {
            for (s, v) in row.iter_mut().enumerate() {
                if (r == i) != (s == i) {
                    *v = -v.clone();
                }
            }
        }
        let part = QJ::monomial(jet, *nu, xi.clone(), f.weight(), index);
        acc = Some(match acc {
            None => part,
            Some(a) => a.add(&part).expect("homogeneous"),
        });
    }
    acc.unwrap_or_else(|| f.scale_rat(&rat_int(0)))
}

/// ⟨𝒮(z_1)⋯𝒮(z_n)⟩ as a kernel: a sum over set partitions of products of
/// block terms 2^{−|A|−1} Σ_s D_τ^{|A|−1} Ê₂(s·w_A), for n ≤ 2.
///
/// The family of D_τÊ₂(w_1 ± w_2) has poles on the diagonals, so the kernel
/// lives in the chamber w_1 ≫ w_2; only its holomorphic part is orthogonal.
pub fn moment_kernel(n: usize, t: Truncs) -> Result<QJ, NPointError> {
    if n == 0 || n > 2 {
        return Err(NPointError::Unsupported(format!("moment kernel for n = {n}")));
    }
    let sh = Shape::Chamber;
    let margin = 6;
    let target: Vec<i64> = (0..n).map(|i| (n - i) as i64 * (t.j - 1) + 1 + margin).collect();
    let cap = target[0] + margin;
    let o = Orders { q: t.q as i64 + 1, w: cap };
    let e2 = Generator::E(2, 0).build(1, o)?;
    let single = |i: usize| pull_back(&e2, n, sh, &[i], &target, cap);
    if n == 1 {
        return Ok(single(0)?.scale_rat(&rat(1, 2)));
    }
    let singles = single(0)?.mul(&single(1)?).scale_rat(&rat(1, 4));
    let sum = pull_back(&e2.d_tau(), 2, sh, &[0, 1], &target, cap)?;
    let pair = sum.add(&reflect_variable(&sum, 1))?.scale_rat(&rat(1, 4));
    Ok(singles.add(&pair)?)
}

/// Holomorphic part of the moment kernel as a box jet with double poles.
pub fn moment_kernel_box(n: usize, t: Truncs) -> Result<Jet, NPointError> {
    Ok(moment_kernel(n, t)?.base().to_box(&vec![2; n], &vec![t.j; n])?)
}

/// ⟨𝒯(z,w)⟩ on the partition side; variables ordered (z, w).
pub fn double_moment_brackets(t: Truncs) -> Result<Jet, NPointError> {
    double_moment_odot_brackets(1, t)
}

/// ⟨𝒯(z_1,w_1)⊙⋯⊙𝒯(z_n,w_n)⟩ on the partition side, variables (z_1, w_1, z_2, w_2, …).
pub fn double_moment_odot_brackets(n: usize, t: Truncs) -> Result<Jet, NPointError> {
    let lo = vec![-1; 2 * n];
    let hi = vec![t.j; 2 * n];
    let mut items = Vec::new();
    for e in box_exponents(&lo, &hi) {
        let mut factors = Vec::with_capacity(n);
        for pair in e.chunks(2) {
            let f = match (pair[0], pair[1]) {
                (-1, 0) | (0, -1) => Some(PartitionFunction::constant(CycQ::from_rat(rat(-1, 2)))),
                (-1, _) | (_, -1) => None,
                (k, lm1) if (k + lm1 + 1) % 2 == 0 => {
                    let s = Family::t(k, lm1 + 1).function()?;
                    let c = Rat::new(BigInt::from(1), factorial(k as u64) * factorial(lm1 as u64));
                    Some(PartitionFunction::linear_combination(&[(CycQ::from_rat(c), s)]))
                }
                _ => None,
            };
            factors.extend(f);
        }
        if factors.len() < n {
            continue;
        }
        let f = if n == 1 { factors.remove(0) } else { odot_all(&factors, t.q)? };
        items.push((e, f));
    }
    jet_from_products(2 * n, &lo, &hi, items, t.q)
}

/// G_n = Π_i −½ Θ(z_i + w_i)/(Θ(z_i)Θ(w_i)), index Σ z_i w_i.
pub fn double_moment_kernel(n: usize, t: Truncs) -> Result<QJ, NPointError> {
    // each simple pole costs one order of the known region
    let o = Orders { q: t.q as i64 + 1, w: t.j + 2 };
    let rank = 2 * n;
    let mut acc = QJ::constant(rank, Shape::Box, QSeries::one(), 0);
    for i in 0..n {
        let (z, w) = (2 * i, 2 * i + 1);
        let g = Generator::Theta(vec![z, w])
            .build(rank, o)?
            .mul(&Generator::ThetaInv(z).build(rank, o)?)
            .mul(&Generator::ThetaInv(w).build(rank, o)?)
            .scale_rat(&rat(-1, 2));
        acc = acc.mul(&g);
    }
    Ok(acc)
}

/// The n-point function of the given kind with its transformation family.
pub fn n_point(kind: Kernel, n: usize, t: Truncs) -> Result<QJ, NPointError> {
    match kind {
        Kernel::BlochOkounkov => Ok(bloch_okounkov_recursion(n, t.q as i64 + 1, t.j)?),
        Kernel::Moment => moment_kernel(n, t),
        Kernel::DoubleMoment => double_moment_kernel(n, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const T: Truncs = Truncs { q: 5, j: 4 };

    #[test]
    fn one_point_untwisted() {
        let br = bloch_okounkov_brackets(&[rat_int(0)], T).unwrap();
        let k = Jet::univariate(1, Shape::Box, 0, &bloch_okounkov_one_point(&rat_int(0), T).unwrap());
        assert!(br.equal_on_box(&k, &[-1], &[T.j], &T.q_order()).unwrap());
    }

    #[test]
    fn one_point_twisted() {
        let a = rat(1, 3);
        let br = bloch_okounkov_brackets(std::slice::from_ref(&a), T).unwrap();
        let k = Jet::univariate(1, Shape::Box, 0, &bloch_okounkov_one_point(&a, T).unwrap());
        assert!(br.equal_on_box(&k, &[-1], &[T.j], &T.q_order()).unwrap());
    }

    #[test]
    fn klein_constant_half() {
        let c = klein_product(&rat(1, 2), 5).unwrap();
        assert!(c.eq_to_order(&QSeries::constant(cyc_root(&rat(-1, 4))), &rat_int(6)).unwrap());
    }

    #[test]
    fn two_point_matches_recursion() {
        let t = Truncs { q: 3, j: 3 };
        let br = bloch_okounkov_brackets(&[rat_int(0), rat_int(0)], t).unwrap();
        let k = bloch_okounkov_kernel_box(2, t).unwrap();
        assert!(br.equal_on_box(&k, &[-1, -1], &[t.j, t.j], &t.q_order()).unwrap());
    }

    #[test]
    fn moments_one_and_two_point() {
        let t = Truncs { q: 4, j: 4 };
        for n in 1..=2 {
            let br = moment_brackets(n, t).unwrap();
            let k = moment_kernel_box(n, t).unwrap();
            assert!(br.equal_on_box(&k, &vec![-2; n], &vec![t.j; n], &t.q_order()).unwrap(), "n={n}");
        }
    }

    #[test]
    fn double_moment_one_point() {
        let t = Truncs { q: 4, j: 4 };
        let br = double_moment_brackets(t).unwrap();
        let k = double_moment_kernel(1, t).unwrap();
        assert_eq!(k.index()[0][1], rat(1, 2));
        assert!(br.equal_on_box(&k.base(), &[-1, -1], &[t.j, t.j], &t.q_order()).unwrap());
    }
}
