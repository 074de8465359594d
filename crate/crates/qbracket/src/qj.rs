//! Quasi-Jacobi forms through their almost-holomorphic completions.
//!
//! A form φ is stored as φ* = Σ φ_{i,j} ν^i ξ^j, where ν and ξ_1, ..., ξ_n are
//! the non-holomorphic completion variables, so that δ_τ = ∂/∂ν and
//! δ_{z_k} = ∂/∂ξ_k. The holomorphic derivatives act by
//!
//!   (D_τ φ)* = 𝔇_τ φ* + Σ_k ξ_k 𝔇_{z_k} φ* + B(ξ, ξ) φ* + k ν φ*,
//!   (D_{z_k} φ)* = 𝔇_{z_k} φ* + 2 Σ_l B_{kl} ξ_l φ*,
//!
//! with 𝔇_τ ν = −ν², 𝔇_τ ξ_k = −ν ξ_k, 𝔇_{z_k} ξ_l = δ_{kl} ν, 𝔇_{z_k} ν = 0,
//! where k is the weight and B the index.

use crate::eisenstein::{e2_quasi, g_hat};
use crate::field::{factorial, rat, rat_int, Rat};
use crate::jet::{Jet, JetError, Shape, INF};
use crate::kernels::{a_hat, e_hat, theta_hat, theta_hat_inv};
use crate::qseries::QSeries;
use crate::wseries::WSeries;
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QjError {
    #[error("weight or index mismatch in a sum")]
    Inhomogeneous,
    #[error("not in the generator ring: {0}")]
    NotInGeneratorRing(String),
    #[error("recursion only implemented up to n = 3, asked for {0}")]
    RecursionRankUnsupported(usize),
    #[error(transparent)]
    Jet(#[from] JetError),
}

type Key = (u32, Vec<u32>);

#[derive(Clone, Debug, PartialEq)]
pub struct QJ {
    rank: usize,
    shape: Shape,
    weight: i64,
    index: Vec<Vec<Rat>>,
    terms: BTreeMap<Key, Jet>,
}

impl QJ {
    fn from_map(rank: usize, shape: Shape, weight: i64, index: Vec<Vec<Rat>>, terms: BTreeMap<Key, Jet>) -> QJ {
        let mut terms = terms;
        terms.retain(|_, j| !j.is_zero());
        QJ { rank, shape, weight, index, terms }
    }

    /// A holomorphic form with no anomaly (trivial family).
    pub fn trivial(jet: Jet, weight: i64, index: Vec<Vec<Rat>>) -> QJ {
        let rank = jet.rank();
        let shape = jet.shape();
        let mut terms = BTreeMap::new();
        terms.insert((0, vec![0; rank]), jet);
        Self::from_map(rank, shape, weight, index, terms)
    }

    pub fn zero_index(rank: usize) -> Vec<Vec<Rat>> {
        vec![vec![Rat::zero(); rank]; rank]
    }

    /// A single term c·ν^nu·ξ^xi.
    pub fn monomial(jet: Jet, nu: u32, xi: Vec<u32>, weight: i64, index: Vec<Vec<Rat>>) -> QJ {
        let rank = jet.rank();
        let shape = jet.shape();
        let mut terms = BTreeMap::new();
        terms.insert((nu, xi), jet);
        Self::from_map(rank, shape, weight, index, terms)
    }

    pub fn constant(rank: usize, shape: Shape, c: QSeries, weight: i64) -> QJ {
        Self::trivial(Jet::constant(rank, shape, c), weight, Self::zero_index(rank))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn index(&self) -> &[Vec<Rat>] {
        &self.index
    }

    /// The holomorphic part φ = φ_{0,0}.
    pub fn base(&self) -> Jet {
        self.component(0, &vec![0; self.rank])
    }

    /// φ_{i,j}.
    pub fn component(&self, i: u32, j: &[u32]) -> Jet {
        self.terms.get(&(i, j.to_vec())).cloned().unwrap_or_else(|| Jet::zero(self.rank, self.shape))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Jet)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &QJ) -> Result<QJ, QjError> {
        if self.weight != other.weight || self.index != other.index {
            return Err(QjError::Inhomogeneous);
        }
        let mut terms = self.terms.clone();
        for (k, j) in &other.terms {
            let slot = terms.entry(k.clone()).or_insert_with(|| Jet::zero(self.rank, self.shape));
            *slot = slot.add(j);
        }
        Ok(Self::from_map(self.rank, self.shape, self.weight, self.index.clone(), terms))
    }

    pub fn sub(&self, other: &QJ) -> Result<QJ, QjError> {
        self.add(&other.scale_rat(&rat_int(-1)))
    }

    pub fn scale_rat(&self, r: &Rat) -> QJ {
        let terms = self.terms.iter().map(|(k, j)| (k.clone(), j.scale_rat(r))).collect();
        Self::from_map(self.rank, self.shape, self.weight, self.index.clone(), terms)
    }

    pub fn mul(&self, other: &QJ) -> QJ {
        let mut terms: BTreeMap<Key, Jet> = BTreeMap::new();
        for ((i1, j1), a) in &self.terms {
            for ((i2, j2), b) in &other.terms {
                let key = (i1 + i2, j1.iter().zip(j2).map(|(x, y)| x + y).collect());
                let p = a.mul(b);
                let slot = terms.entry(key).or_insert_with(|| Jet::zero(self.rank, self.shape));
                *slot = slot.add(&p);
            }
        }
        let index = self.index.iter().zip(&other.index).map(|(r, s)| r.iter().zip(s).map(|(a, b)| a + b).collect()).collect();
        Self::from_map(self.rank, self.shape, self.weight + other.weight, index, terms)
    }

    fn with_terms(&self, weight: i64, terms: BTreeMap<Key, Jet>) -> QJ {
        Self::from_map(self.rank, self.shape, weight, self.index.clone(), terms)
    }

    fn accumulate(acc: &mut BTreeMap<Key, Jet>, key: Key, j: Jet, rank: usize, shape: Shape) {
        let slot = acc.entry(key).or_insert_with(|| Jet::zero(rank, shape));
        *slot = slot.add(&j);
    }

    /// δ_τ = ∂/∂ν.
    pub fn delta_tau(&self) -> QJ {
        let mut acc = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            if *i > 0 {
                Self::accumulate(&mut acc, (i - 1, j.clone()), c.scale_rat(&rat_int(*i as i64)), self.rank, self.shape);
            }
        }
        self.with_terms(self.weight - 2, acc)
    }

    /// δ_{z_k} = ∂/∂ξ_k.
    pub fn delta_z(&self, k: usize) -> QJ {
        let mut acc = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            if j[k] > 0 {
                let mut j2 = j.clone();
                j2[k] -= 1;
                Self::accumulate(&mut acc, (*i, j2), c.scale_rat(&rat_int(j[k] as i64)), self.rank, self.shape);
            }
        }
        self.with_terms(self.weight - 1, acc)
    }

    /// W: multiplication by the weight.
    pub fn w_op(&self) -> QJ {
        self.scale_rat(&rat_int(self.weight))
    }

    /// I_{kl}: multiplication by the index entry.
    pub fn i_op(&self, k: usize, l: usize) -> QJ {
        self.scale_rat(&self.index[k][l])
    }

    /// 𝔇_{z_k}: w-derivative of coefficients plus ξ_k ↦ ν.
    fn frak_dz(&self, k: usize) -> BTreeMap<Key, Jet> {
        let mut acc = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            Self::accumulate(&mut acc, (*i, j.clone()), c.d_w(k), self.rank, self.shape);
            if j[k] > 0 {
                let mut j2 = j.clone();
                j2[k] -= 1;
                Self::accumulate(&mut acc, (i + 1, j2), c.scale_rat(&rat_int(j[k] as i64)), self.rank, self.shape);
            }
        }
        acc
    }

    fn times_xi(terms: &BTreeMap<Key, Jet>, l: usize, r: &Rat, rank: usize, shape: Shape, acc: &mut BTreeMap<Key, Jet>) {
        if r.is_zero() {
            return;
        }
        for ((i, j), c) in terms {
            let mut j2 = j.clone();
            j2[l] += 1;
            Self::accumulate(acc, (*i, j2), c.scale_rat(r), rank, shape);
        }
    }

    /// D_{z_k}.
    pub fn d_z(&self, k: usize) -> QJ {
        let mut acc = self.frak_dz(k);
        for l in 0..self.rank {
            let r = &self.index[k][l] * rat_int(2);
            Self::times_xi(&self.terms, l, &r, self.rank, self.shape, &mut acc);
        }
        self.with_terms(self.weight + 1, acc)
    }

    /// D_τ.
    pub fn d_tau(&self) -> QJ {
        let (rank, shape) = (self.rank, self.shape);
        let mut acc = BTreeMap::new();
        // 𝔇_τ
        for ((i, j), c) in &self.terms {
            Self::accumulate(&mut acc, (*i, j.clone()), c.d_tau(), rank, shape);
            let deg = *i as i64 + j.iter().map(|&x| x as i64).sum::<i64>();
            if deg > 0 {
                Self::accumulate(&mut acc, (i + 1, j.clone()), c.scale_rat(&rat_int(-deg)), rank, shape);
            }
        }
        // Σ_k ξ_k 𝔇_{z_k}
        for k in 0..rank {
            let dk = self.frak_dz(k);
            Self::times_xi(&dk, k, &rat_int(1), rank, shape, &mut acc);
        }
        // B(ξ, ξ)
        for a in 0..rank {
            for b in 0..rank {
                if self.index[a][b].is_zero() {
                    continue;
                }
                let mut once = BTreeMap::new();
                Self::times_xi(&self.terms, a, &rat_int(1), rank, shape, &mut once);
                Self::times_xi(&once, b, &self.index[a][b], rank, shape, &mut acc);
            }
        }
        // k ν
        for ((i, j), c) in &self.terms {
            Self::accumulate(&mut acc, (i + 1, j.clone()), c.scale_rat(&rat_int(self.weight)), rank, shape);
        }
        self.with_terms(self.weight + 2, acc)
    }

    /// Agreement of every component on the common known region.
    pub fn agrees_with(&self, other: &QJ) -> bool {
        if self.weight != other.weight || self.index != other.index {
            return false;
        }
        let keys: std::collections::BTreeSet<&Key> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|k| {
            let a = self.terms.get(k).cloned().unwrap_or_else(|| Jet::zero(self.rank, self.shape));
            let b = other.terms.get(k).cloned().unwrap_or_else(|| Jet::zero(self.rank, self.shape));
            a.agrees_with(&b)
        })
    }

    /// Smallest known-region bound over all components, a guard against vacuous comparisons.
    pub fn min_region(&self) -> i64 {
        self.terms.values().flat_map(|j| j.hi().iter().copied()).min().unwrap_or(INF)
    }

    pub fn has_anomaly(&self) -> bool {
        self.terms.keys().any(|(i, j)| *i > 0 || j.iter().any(|&x| x > 0))
    }
}

/// q- and w-orders used when building generator jets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Orders {
    pub q: i64,
    pub w: i64,
}

/// The generators of the ring: Θ(L) for a sum L of variables, 1/Θ(w_i),
/// Â(w_i), Ê_k(w_i), 𝕖₂ and ĝ_{2m}, each with its transformation family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    Theta(Vec<usize>),
    ThetaInv(usize),
    A(usize),
    E(u32, usize),
    E2Quasi,
    GHat(u32),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = |v: &[usize]| v.iter().map(|i| format!("z{}", i + 1)).collect::<Vec<_>>().join("+");
        match self {
            Generator::Theta(v) => write!(f, "Θ({})", vars(v)),
            Generator::ThetaInv(i) => write!(f, "1/Θ(z{})", i + 1),
            Generator::A(i) => write!(f, "A(z{})", i + 1),
            Generator::E(k, i) => write!(f, "E{k}(z{})", i + 1),
            Generator::E2Quasi => write!(f, "e2"),
            Generator::GHat(k) => write!(f, "g{k}"),
        }
    }
}

fn square_index(rank: usize, vars: &[usize], c: Rat) -> Vec<Vec<Rat>> {
    let mut m = QJ::zero_index(rank);
    for &a in vars {
        for &b in vars {
            m[a][b] = c.clone();
        }
    }
    m
}

fn unit_key(rank: usize, i: u32, xi: Option<usize>) -> Key {
    let mut j = vec![0; rank];
    if let Some(k) = xi {
        j[k] = 1;
    }
    (i, j)
}

impl Generator {
    pub fn weight(&self) -> i64 {
        match self {
            Generator::Theta(_) => -1,
            Generator::ThetaInv(_) | Generator::A(_) => 1,
            Generator::E(k, _) | Generator::GHat(k) => *k as i64,
            Generator::E2Quasi => 2,
        }
    }

    /// The generator as a family on a box of the given rank.
    pub fn build(&self, rank: usize, o: Orders) -> Result<QJ, QjError> {
        let sh = Shape::Box;
        let target = vec![o.w; rank];
        let one_var = |i: usize, p: &WSeries| Jet::substitute(rank, sh, &[i], p, &target);
        Ok(match self {
            Generator::Theta(vars) => {
                let p = theta_hat(o.q, vars.len() as i64 * o.w + 2);
                let jet = Jet::substitute(rank, sh, vars, &p, &target)?;
                QJ::trivial(jet, -1, square_index(rank, vars, rat(1, 2)))
            }
            Generator::ThetaInv(i) => QJ::trivial(one_var(*i, &theta_hat_inv(o.q, o.w))?, 1, square_index(rank, &[*i], rat(-1, 2))),
            Generator::A(i) => {
                let mut terms = BTreeMap::new();
                terms.insert(unit_key(rank, 0, None), one_var(*i, &a_hat(o.q, o.w))?);
                terms.insert(unit_key(rank, 0, Some(*i)), Jet::one(rank, sh));
                QJ::from_map(rank, sh, 1, QJ::zero_index(rank), terms)
            }
            Generator::E(k, i) => {
                if *k == 0 {
                    return Err(QjError::NotInGeneratorRing("E0".into()));
                }
                let base = one_var(*i, &e_hat(*k as i64, o.q, o.w))?;
                match k {
                    1 => Generator::A(*i).build(rank, o)?,
                    2 => {
                        let mut terms = BTreeMap::new();
                        terms.insert(unit_key(rank, 0, None), base);
                        terms.insert(unit_key(rank, 1, None), Jet::constant(rank, sh, QSeries::constant(crate::cyclotomic::CycQ::from_int(-1))));
                        QJ::from_map(rank, sh, 2, QJ::zero_index(rank), terms)
                    }
                    _ => QJ::trivial(base, *k as i64, QJ::zero_index(rank)),
                }
            }
            Generator::E2Quasi => {
                let mut terms = BTreeMap::new();
                terms.insert(unit_key(rank, 0, None), Jet::constant(rank, sh, e2_quasi(o.q)));
                terms.insert(unit_key(rank, 1, None), Jet::one(rank, sh));
                QJ::from_map(rank, sh, 2, QJ::zero_index(rank), terms)
            }
            Generator::GHat(k) => {
                if *k < 4 || k % 2 == 1 {
                    return Err(QjError::NotInGeneratorRing(format!("g{k}")));
                }
                QJ::constant(rank, sh, g_hat(*k, o.q), *k as i64)
            }
        })
    }
}

/// Coefficients of a rank-1 jet as a univariate series on [lo, min(hi, cap)).
fn jet_to_wseries(j: &Jet, cap: i64) -> WSeries {
    let lo = j.lo()[0];
    let hi = j.hi()[0].min(cap);
    let coeffs = (lo..hi).map(|e| j.coeff(&[e]).unwrap_or_else(|_| QSeries::zero())).collect();
    WSeries::new(lo, coeffs)
}

/// Pull a rank-1 element back along w ↦ Σ_{a∈vars} w_a, ξ ↦ Σ_{a∈vars} ξ_a.
/// An empty `vars` evaluates at w = 0, ξ = 0.
pub fn pull_back(f: &QJ, rank: usize, shape: Shape, vars: &[usize], target: &[i64], cap: i64) -> Result<QJ, QjError> {
    assert_eq!(f.rank(), 1);
    let mut acc: BTreeMap<Key, Jet> = BTreeMap::new();
    for ((i, j), c) in f.terms() {
        let p = jet_to_wseries(c, cap);
        if vars.is_empty() {
            if j[0] > 0 {
                continue;
            }
            let v = if p.val() <= 0 && p.trunc() > 0 { p.coeff(0) } else { QSeries::zero() };
            if p.terms().any(|(e, _)| e < 0) {
                return Err(QjError::Jet(JetError::NonOrthogonalPoles(vec![0])));
            }
            QJ::accumulate(&mut acc, (*i, vec![0; rank]), Jet::constant(rank, shape, v), rank, shape);
            continue;
        }
        let jet = Jet::substitute(rank, shape, vars, &p, target)?;
        // (Σ ξ_a)^m expanded multinomially
        let m = j[0];
        for split in xi_splits(vars, m, rank) {
            let coef = multinomial(&split);
            QJ::accumulate(&mut acc, (*i, split), jet.scale_rat(&Rat::from_integer(coef)), rank, shape);
        }
    }
    let mut index = QJ::zero_index(rank);
    for &a in vars {
        for &b in vars {
            index[a][b] = f.index()[0][0].clone();
        }
    }
    Ok(QJ::from_map(rank, shape, f.weight(), index, acc))
}

fn xi_splits(vars: &[usize], m: u32, rank: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; rank]];
    for _ in 0..m {
        let mut next = Vec::new();
        for base in &out {
            for &a in vars {
                let mut v = base.clone();
                v[a] += 1;
                next.push(v);
            }
        }
        out = next;
    }
    out.sort();
    out.dedup();
    out
}

fn multinomial(v: &[u32]) -> BigInt {
    let total: u32 = v.iter().sum();
    v.iter().fold(factorial(total as u64), |acc, &a| acc / factorial(a as u64))
}

/// Bloch–Okounkov n-point function from the recursion
///   Θ(s_n) V_n = Σ_{m<n} (−1)^{n−m+1}/(n−m)! · Θ^{(n−m)}(s_m) V_m,  V_0 = 1,
/// summed over all orderings of the variables, each ordering recomputed from the
/// formula in the chamber w_1 ≫ ⋯ ≫ w_n. The box jet is read off at w-order `j`.
pub fn bloch_okounkov_recursion(n: usize, q: i64, j: i64) -> Result<QJ, QjError> {
    if n == 0 || n > 3 {
        return Err(QjError::RecursionRankUnsupported(n));
    }
    let margin = 3 * n as i64 + 2;
    let target: Vec<i64> = (0..n).map(|t| (n - t) as i64 * (j - 1) + 1 + margin).collect();
    let cap = target[0] + margin + 2;
    let sh = Shape::Chamber;
    // rank-1 Θ and its derivatives as families
    let theta1 = QJ::trivial(Jet::univariate(1, Shape::Box, 0, &theta_hat(q, cap + n as i64 + 2)), -1, vec![vec![rat(1, 2)]]);
    let mut derivs = vec![theta1];
    for r in 1..=n {
        let next = derivs[r - 1].d_z(0);
        derivs.push(next);
    }
    let inv1 = QJ::trivial(Jet::univariate(1, Shape::Box, 0, &theta_hat_inv(q, cap)), 1, vec![vec![rat(-1, 2)]]);
    let all: Vec<usize> = (0..n).collect();
    let inv_sn = pull_back(&inv1, n, sh, &all, &target, cap)?;
    let mut total: Option<QJ> = None;
    for perm in permutations(n) {
        let mut v: Vec<QJ> = vec![QJ::constant(n, sh, QSeries::one(), 0)];
        for k in 1..=n {
            let mut rhs: Option<QJ> = None;
            for (m, vm) in v.iter().enumerate() {
                let r = k - m;
                let sign = if (r + 1) % 2 == 0 { 1 } else { -1 };
                let c = Rat::new(BigInt::from(sign), factorial(r as u64));
                let vars: Vec<usize> = perm[..m].to_vec();
                let th = pull_back(&derivs[r], n, sh, &vars, &target, cap)?;
                let term = th.mul(vm).scale_rat(&c);
                rhs = Some(match rhs {
                    None => term,
                    Some(acc) => acc.add(&term)?,
                });
            }
            let vars: Vec<usize> = perm[..k].to_vec();
            let inv = if k == n { inv_sn.clone() } else { pull_back(&inv1, n, sh, &vars, &target, cap)? };
            v.push(rhs.expect("nonempty sum").mul(&inv));
        }
        let vn = v.pop().expect("V_n");
        total = Some(match total {
            None => vn,
            Some(acc) => acc.add(&vn)?,
        });
    }
    Ok(total.expect("at least one ordering"))
}

/// F_{n}(…) with the first two variables merged: F(L, w_3, …) in the chamber, for checking δ_z F_n.
pub fn merged_lower_point(n: usize, merge: (usize, usize), q: i64, j: i64) -> Result<Jet, QjError> {
    let margin = 3 * n as i64 + 2;
    let target: Vec<i64> = (0..n).map(|t| (n - t) as i64 * (j - 1) + 1 + margin).collect();
    let cap = target[0] + margin + 2;
    let sh = Shape::Chamber;
    let inv1 = theta_hat_inv(q, cap);
    let a1 = a_hat(q, cap);
    let (p, r) = merge;
    let merged = {
        let mut v = vec![p, r];
        v.sort_unstable();
        v
    };
    let others: Vec<usize> = (0..n).filter(|i| *i != p && *i != r).collect();
    let all: Vec<usize> = (0..n).collect();
    let inv_all = Jet::substitute(n, sh, &all, &inv1, &target)?;
    match others.len() {
        0 => Ok(inv_all),
        1 => {
            // F_2(x, y) = (Â(x) + Â(y)) / Θ(x + y)
            let ax = Jet::substitute(n, sh, &merged, &a1, &target)?;
            let ay = Jet::substitute(n, sh, &others, &a1, &target)?;
            Ok(ax.add(&ay).mul(&inv_all))
        }
        _ => Err(QjError::RecursionRankUnsupported(n)),
    }
}

/// The chamber jet of 1/Θ(w_1 + ⋯ + w_n).
pub fn inverse_theta_of_sum(n: usize, q: i64, j: i64) -> Result<Jet, QjError> {
    merged_lower_point_all(n, q, j)
}

fn merged_lower_point_all(n: usize, q: i64, j: i64) -> Result<Jet, QjError> {
    let margin = 3 * n as i64 + 2;
    let target: Vec<i64> = (0..n).map(|t| (n - t) as i64 * (j - 1) + 1 + margin).collect();
    let cap = target[0] + margin + 2;
    let all: Vec<usize> = (0..n).collect();
    Ok(Jet::substitute(n, Shape::Chamber, &all, &theta_hat_inv(q, cap), &target)?)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut v = p.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out.sort();
    out
}

/// A random product of one to three rank-2 generators with a small rational scalar.
pub fn random_element<R: Rng>(rng: &mut R, o: Orders) -> Result<QJ, QjError> {
    let pool = [
        Generator::Theta(vec![0]),
        Generator::Theta(vec![1]),
        Generator::Theta(vec![0, 1]),
        Generator::A(0),
        Generator::A(1),
        Generator::E(2, 0),
        Generator::E(2, 1),
        Generator::E(3, 1),
        Generator::E2Quasi,
        Generator::GHat(4),
    ];
    let len = rng.gen_range(1..=3);
    let mut f = QJ::constant(2, Shape::Box, QSeries::one(), 0);
    for _ in 0..len {
        let g = &pool[rng.gen_range(0..pool.len())];
        f = f.mul(&g.build(2, o)?);
    }
    Ok(f.scale_rat(&rat(rng.gen_range(1..5), rng.gen_range(1..4))))
}

/// Every commutator of the derivation algebra evaluated on `f`, by name.
/// A relation counts as holding when both sides agree on a region of size ≥ 2.
pub fn commutator_relations(f: &QJ) -> Vec<(String, bool)> {
    let comm = |a: &dyn Fn(&QJ) -> QJ, b: &dyn Fn(&QJ) -> QJ| a(&b(f)).sub(&b(&a(f)));
    let zero = |g: QJ| g.scale_rat(&Rat::zero());
    let mut out = Vec::new();
    let mut check = |name: String, lhs: Result<QJ, QjError>, rhs: QJ| {
        let ok = lhs.is_ok_and(|l| l.min_region() >= 2 && l.agrees_with(&rhs));
        out.push((name, ok));
    };
    check("[δτ,Dτ] = W".into(), comm(&|g| g.delta_tau(), &|g| g.d_tau()), f.w_op());
    check("[W,Dτ] = 2Dτ".into(), comm(&|g| g.w_op(), &|g| g.d_tau()), f.d_tau().scale_rat(&rat_int(2)));
    check("[W,δτ] = −2δτ".into(), comm(&|g| g.w_op(), &|g| g.delta_tau()), f.delta_tau().scale_rat(&rat_int(-2)));
    for i in 0..2 {
        for k in 0..2 {
            let (a, b) = (i + 1, k + 1);
            check(format!("[δz{a},Dz{b}] = 2I{a}{b}"), comm(&|g| g.delta_z(i), &|g| g.d_z(k)), f.i_op(i, k).scale_rat(&rat_int(2)));
            check(format!("[I{a}{b},Dz1] = 0"), comm(&|g| g.i_op(i, k), &|g| g.d_z(0)), zero(f.d_z(0)));
            check(format!("[I{a}{b},δz2] = 0"), comm(&|g| g.i_op(i, k), &|g| g.delta_z(1)), zero(f.delta_z(1)));
            check(format!("[Dz{a},Dz{b}] = 0"), comm(&|g| g.d_z(i), &|g| g.d_z(k)), zero(f.d_z(i).d_z(k)));
            check(format!("[δz{a},δz{b}] = 0"), comm(&|g| g.delta_z(i), &|g| g.delta_z(k)), zero(f.delta_z(i).delta_z(k)));
        }
        let a = i + 1;
        check(format!("[δz{a},Dτ] = Dz{a}"), comm(&|g| g.delta_z(i), &|g| g.d_tau()), f.d_z(i));
        check(format!("[δτ,Dz{a}] = δz{a}"), comm(&|g| g.delta_tau(), &|g| g.d_z(i)), f.delta_z(i));
        check(format!("[W,Dz{a}] = Dz{a}"), comm(&|g| g.w_op(), &|g| g.d_z(i)), f.d_z(i));
        check(format!("[W,δz{a}] = −δz{a}"), comm(&|g| g.w_op(), &|g| g.delta_z(i)), f.delta_z(i).scale_rat(&rat_int(-1)));
        check(format!("[Dτ,Dz{a}] = 0"), comm(&|g| g.d_tau(), &|g| g.d_z(i)), zero(f.d_z(i).d_tau()));
        check(format!("[δτ,δz{a}] = 0"), comm(&|g| g.delta_tau(), &|g| g.delta_z(i)), zero(f.delta_z(i).delta_tau()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat_int;

    const O: Orders = Orders { q: 5, w: 6 };

    fn gen(g: Generator, rank: usize) -> QJ {
        g.build(rank, O).unwrap()
    }

    #[test]
    fn generator_table() {
        let a = gen(Generator::A(0), 1);
        assert_eq!(a.delta_z(0).base(), Jet::one(1, Shape::Box));
        assert!(a.delta_tau().base().is_zero());
        let e2 = gen(Generator::E(2, 0), 1);
        assert_eq!(e2.delta_tau().base(), Jet::constant(1, Shape::Box, QSeries::constant(crate::cyclotomic::CycQ::from_int(-1))));
        let q2 = gen(Generator::E2Quasi, 1);
        assert_eq!(q2.delta_tau().base(), Jet::one(1, Shape::Box));
        for g in [Generator::Theta(vec![0]), Generator::E(3, 0), Generator::GHat(4)] {
            let f = gen(g, 1);
            assert!(!f.has_anomaly());
        }
    }

    #[test]
    fn theta_commutator_example() {
        // [δ_z, D_z]Θ = 2·(1/2)·Θ
        let th = gen(Generator::Theta(vec![0]), 1);
        let lhs = th.d_z(0).delta_z(0).sub(&th.delta_z(0).d_z(0)).unwrap();
        assert!(lhs.agrees_with(&th));
    }

    #[test]
    fn heat_type_identity_for_theta() {
        // D_τΘ = Θ·(½(Â² − Ê₂) − (3/2)𝕖₂), including families
        let th = gen(Generator::Theta(vec![0]), 1);
        let a = gen(Generator::A(0), 1);
        let e2 = gen(Generator::E(2, 0), 1);
        let q2 = gen(Generator::E2Quasi, 1);
        let bracket = a.mul(&a).sub(&e2).unwrap().scale_rat(&rat(1, 2)).sub(&q2.scale_rat(&rat(3, 2))).unwrap();
        let rhs = th.mul(&bracket);
        let lhs = th.d_tau();
        assert!(lhs.min_region() >= 3);
        assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn f1_and_f2_from_recursion() {
        let f1 = bloch_okounkov_recursion(1, 5, 5).unwrap();
        assert!(!f1.has_anomaly());
        let direct = Jet::univariate(1, Shape::Chamber, 0, &theta_hat_inv(5, 5));
        assert!(f1.base().agrees_with(&direct));
        let f2 = bloch_okounkov_recursion(2, 4, 4).unwrap();
        assert!(f2.delta_tau().terms().next().is_none());
        let lhs = f2.delta_z(0).base();
        let rhs = inverse_theta_of_sum(2, 4, 4).unwrap();
        assert!(lhs.agrees_with(&rhs));
        assert!(lhs.knows(&[-2, 3]));
        let b = f2.base().to_box(&[1, 1], &[4, 4]).unwrap();
        assert_eq!(b.coeff(&[-1, -1]).unwrap().truncate_int(4), QSeries::one().truncate_int(4));
    }

    #[test]
    fn f3_lowering_and_holomorphy() {
        let (q, j) = (3, 3);
        let f3 = bloch_okounkov_recursion(3, q, j).unwrap();
        assert!(f3.delta_tau().terms().next().is_none());
        let lhs = f3.delta_z(0).base();
        let rhs = merged_lower_point(3, (0, 1), q, j).unwrap().add(&merged_lower_point(3, (0, 2), q, j).unwrap());
        assert!(lhs.knows(&[-1, -1, 1]));
        assert!(lhs.agrees_with(&rhs));
        // the symmetrized function is symmetric in the box
        let b = f3.base().to_box(&[1, 1, 1], &[j, j, j]).unwrap();
        assert_eq!(b.permute(&[1, 0, 2]), b);
        assert_eq!(b.permute(&[2, 1, 0]), b);
    }

    #[test]
    fn commutator_relations_on_random_elements() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let o = Orders { q: 4, w: 7 };
        for _ in 0..6 {
            let f = random_element(&mut rng, o).unwrap();
            for (name, ok) in commutator_relations(&f) {
                assert!(ok, "{name} on {f:?}");
            }
        }
    }

    #[test]
    fn unsupported_rank() {
        assert_eq!(bloch_okounkov_recursion(4, 2, 2).err(), Some(QjError::RecursionRankUnsupported(4)));
        assert_eq!(rat_int(0), Rat::zero());
    }
}
