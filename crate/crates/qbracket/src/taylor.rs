//! Corrected Taylor coefficients g^X_ℓ of quasi-Jacobi forms, the auxiliary
//! coefficients g^{X,r}_{ℓ,s}, and the modular combinations ξ^X_ℓ.
//!
//! Everything is in the hatted variable w = 2πiz, so a coefficient g_ℓ of
//! w^ℓ has weight k + |ℓ| and the completion variables carry no powers of 2πi.

use crate::cyclotomic::CycQ;
use crate::eisenstein::{e2_quasi, g_series};
use crate::field::{factorial, rat, rat_int, Rat};
use crate::fourier::{rho, zeta_pair, FourierError, FourierForm, Translate};
use crate::jet::{Jet, JetError, Shape, INF};
use crate::qj::QJ;
use crate::qseries::{QSeries, SeriesError};
use crate::quasimodular::{certify, CertError, Status};
use crate::wseries::WSeries;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TaylorError {
    #[error("vanishing Pochhammer denominator at weight {0}")]
    PochhammerZero(i64),
    #[error("ξ needs k + |ℓ| ≥ 0, got {0}")]
    NegativeWeight(i64),
    #[error("coefficient not available: {0}")]
    Unavailable(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Cert(#[from] CertError),
}

/// A source of the coefficients g^{X,r}_{ℓ,s} for one fixed form and translate.
pub trait TaylorData {
    fn weight(&self) -> i64;
    fn rank(&self) -> usize;
    /// g^{r}_{ℓ,s}: the ℓ-th coefficient of B(w,w)^r Σ_{i+|j|=s} φ_{i,j} w^j.
    fn g_rs(&self, ell: &[i64], r: u32, s: u32) -> Result<QSeries, TaylorError>;

    fn g(&self, ell: &[i64]) -> Result<QSeries, TaylorError> {
        self.g_rs(ell, 0, 0)
    }
}

/// Taylor data of a quasi-Jacobi form at X = 0, read off its completion.
pub struct AtOrigin<'a> {
    phi: &'a QJ,
}

impl<'a> AtOrigin<'a> {
    pub fn new(phi: &'a QJ) -> Self {
        AtOrigin { phi }
    }
}

fn monomial_jet(rank: usize, shape: Shape, e: Vec<i64>, c: QSeries) -> Jet {
    Jet::from_terms(rank, shape, vec![INF; rank], [(e, c)])
}

/// B(w, w) = Σ M_ij w_i w_j.
fn quadratic_jet(m: &[Vec<Rat>], shape: Shape) -> Jet {
    let n = m.len();
    let mut acc = Jet::zero(n, shape);
    for i in 0..n {
        for j in 0..n {
            if m[i][j].is_zero() {
                continue;
            }
            let mut e = vec![0; n];
            e[i] += 1;
            e[j] += 1;
            acc = acc.add(&monomial_jet(n, shape, e, QSeries::constant(CycQ::from_rat(m[i][j].clone()))));
        }
    }
    acc
}

impl TaylorData for AtOrigin<'_> {
    fn weight(&self) -> i64 {
        self.phi.weight()
    }

    fn rank(&self) -> usize {
        self.phi.rank()
    }

    fn g_rs(&self, ell: &[i64], r: u32, s: u32) -> Result<QSeries, TaylorError> {
        let n = self.phi.rank();
        let shape = self.phi.base().shape();
        let mut acc = Jet::zero(n, shape);
        for ((i, j), jet) in self.phi.terms() {
            if *i + j.iter().sum::<u32>() != s {
                continue;
            }
            let wj = monomial_jet(n, shape, j.iter().map(|&x| x as i64).collect(), QSeries::one());
            acc = acc.add(&jet.mul(&wj));
        }
        if r > 0 {
            acc = acc.mul(&quadratic_jet(self.phi.index(), shape).pow(r));
        }
        if !acc.knows(ell) {
            return Err(TaylorError::Unavailable(format!("g^{r}_{{{ell:?},{s}}}")));
        }
        Ok(acc.coeff(ell)?)
    }
}

/// The F₁ = 1/Θ context at a rational translate: F₁‖X = ρ(X)⁻¹/(Θ|X), with
/// index −½ and a trivial family, so g^{X,r}_{ℓ,s} = (−½)^r g^X_{ℓ−2r} for s = 0
/// and vanishes for s > 0.
#[derive(Clone, Debug)]
pub struct InverseThetaAt {
    x: Translate,
    series: WSeries,
}

/// The index of F₁.
pub fn inverse_theta_index() -> Vec<Vec<Rat>> {
    vec![vec![rat(-1, 2)]]
}

impl InverseThetaAt {
    /// Expansion to w^{j−1} (w^j excluded) and q-order at least `t`.
    pub fn new(x: Translate, j: i64, t: &Rat) -> Result<Self, TaylorError> {
        let m = inverse_theta_index();
        let mut big = t + rat_int(2);
        loop {
            let th = FourierForm::big_theta(&big).slash(&x)?;
            if th.trunc() >= t {
                let w = th.to_wseries(j + 2)?;
                let inv = w.invert()?.truncate_w(j);
                let rho_inv = rho(&x, &m).inverse().expect("root of unity");
                let series = inv.scale(&rho_inv).truncate_q(t);
                return Ok(InverseThetaAt { x, series });
            }
            big *= rat_int(2);
        }
    }

    pub fn translate(&self) -> &Translate {
        &self.x
    }

    /// F₁‖X as a w-series.
    pub fn series(&self) -> &WSeries {
        &self.series
    }
}

impl TaylorData for InverseThetaAt {
    fn weight(&self) -> i64 {
        1
    }

    fn rank(&self) -> usize {
        1
    }

    fn g_rs(&self, ell: &[i64], r: u32, s: u32) -> Result<QSeries, TaylorError> {
        if s > 0 {
            return Ok(QSeries::zero());
        }
        let e = ell[0] - 2 * r as i64;
        if e >= self.series.trunc() {
            return Err(TaylorError::Unavailable(format!("w^{e} of F1 at the translate")));
        }
        Ok(self.series.coeff(e).scale_rat(&rat(-1, 2).pow(r as i32)))
    }
}

/// Which derivative enters ξ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XiVariant {
    /// D_τ with integer-shifted Pochhammer symbols, special-cased at weight 2.
    D,
    /// D_τ + 𝔾₂ with half-integer shifts; no special case needed.
    Shifted,
}

/// Rising factorial (x)_n.
fn rising(x: &Rat, n: u32) -> Rat {
    (0..n).fold(Rat::one(), |acc, i| acc * (x + rat_int(i as i64)))
}

fn apply_derivative(f: &QSeries, times: u32, variant: XiVariant, order: i64) -> QSeries {
    let mut f = f.truncate_int(order);
    for _ in 0..times {
        f = match variant {
            XiVariant::D => f.d_tau(),
            XiVariant::Shifted => f.d_tau().add(&f.mul(&g_series(2, order))),
        };
    }
    f
}

/// The common q-order of a set of coefficients; exact ones do not constrain it.
fn common_order(series: &[QSeries]) -> Result<i64, TaylorError> {
    series
        .iter()
        .filter_map(|s| s.trunc())
        .min()
        .map(|t| t.ceil().to_integer().try_into().unwrap_or(i64::MAX / 4))
        .ok_or_else(|| TaylorError::Unavailable("every coefficient is exact; no working q-order".into()))
}

/// ξ_ℓ for a Taylor data source, in either variant.
pub fn xi<T: TaylorData + ?Sized>(data: &T, ell: &[i64], variant: XiVariant) -> Result<QSeries, TaylorError> {
    let kk = data.weight() + ell.iter().sum::<i64>();
    if kk < 0 {
        return Err(TaylorError::NegativeWeight(kk));
    }
    let rmax = (kk / 2) as u32;
    if rmax == 0 {
        return data.g(ell);
    }
    let mut gs = Vec::new();
    for r in 0..=rmax {
        for s in 0..=r {
            gs.push(((r, s), data.g_rs(ell, r - s, s)?));
        }
    }
    let g_of = |r: u32, s: u32| gs.iter().find(|(k, _)| *k == (r, s)).map(|(_, g)| g.clone()).expect("collected above");
    let order = common_order(&gs.iter().map(|(_, g)| g.clone()).chain([data.g(ell)?]).collect::<Vec<_>>())?;
    if kk == 2 && variant == XiVariant::D {
        let corr = data.g_rs(ell, 1, 0)?.add(&data.g_rs(ell, 0, 1)?);
        return Ok(data.g(ell)?.sub(&corr.mul(&e2_quasi(order))));
    }
    let mut acc = QSeries::big_o(rat_int(order));
    for r in 0..=rmax {
        let shift = match variant {
            XiVariant::D => rat_int(kk - r as i64 - 1),
            XiVariant::Shifted => rat_int(kk - r as i64 - 1) - rat(1, 2),
        };
        let poch = rising(&shift, r);
        if poch.is_zero() {
            return Err(TaylorError::PochhammerZero(kk));
        }
        for s in 0..=r {
            let g = g_of(r, s);
            if g.is_zero() {
                continue;
            }
            let denom = &poch * Rat::from_integer(factorial((r - s) as u64));
            let sign = if r % 2 == 0 { Rat::one() } else { -Rat::one() };
            acc = acc.add(&apply_derivative(&g, r, variant, order).scale_rat(&(sign / denom)));
        }
    }
    Ok(acc)
}

/// The elliptic transformation ρ(X′)ζ_{X′,X} f^{X+X′} = f^X for F₁, on all
/// coefficients below w^j, for every X′ with entries in `range`.
pub fn check_elliptic_transformation(x: &Translate, range: &[i64], j: i64, t: &Rat) -> Result<Vec<(Translate, bool)>, TaylorError> {
    let m = inverse_theta_index();
    let base = InverseThetaAt::new(x.clone(), j, t)?;
    let mut out = Vec::new();
    for &a in range {
        for &b in range {
            let xp = Translate::single(rat_int(a), rat_int(b));
            let moved = InverseThetaAt::new(x.add(&xp), j, t)?;
            let c = &rho(&xp, &m) * &zeta_pair(&xp, x, &m);
            let lhs = moved.series().scale(&c);
            out.push((xp, lhs.eq_common(base.series())));
        }
    }
    Ok(out)
}

/// Outcome of one δ-identity check on a Taylor coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaCheck {
    pub ell: i64,
    pub r: u32,
    pub status: Status,
    pub holds: bool,
}

/// δ^r g_ℓ = Σ_s r!/(r−s)! g^{r−s}_{ℓ,s} for a rank-1 source.
///
/// At the origin g_ℓ is certified at level 1. At a translate, g_0 is a modular
/// form (with character), so the check runs on the ratio g_ℓ/g_0, certified at
/// level 2 after τ ↦ 2τ, against the right side divided by g_0.
pub fn check_delta_identity<T: TaylorData + ?Sized>(data: &T, ell: i64, r: u32, at_origin: bool, margin: usize) -> Result<DeltaCheck, TaylorError> {
    let g = data.g(&[ell])?;
    let mut rhs = QSeries::zero();
    for s in 0..=r {
        let c = Rat::new(factorial(r as u64), factorial((r - s) as u64));
        rhs = rhs.add(&data.g_rs(&[ell], r - s, s)?.scale_rat(&c));
    }
    let (target, rhs, weight, level) = if at_origin {
        (g, rhs, data.weight() + ell, 1)
    } else {
        let g0 = data.g(&[0])?;
        (g.div(&g0)?, rhs.div(&g0)?, ell, 2)
    };
    let depth = (weight.max(0) / 2) as u32;
    let cert = certify(&target, weight, level, depth, margin)?;
    let Some(poly) = cert.poly.clone() else {
        return Ok(DeltaCheck { ell, r, status: cert.status, holds: false });
    };
    let mut d = poly;
    for _ in 0..r {
        d = d.delta();
    }
    let len = target.trunc().map(|x| x.floor().to_integer()).unwrap_or_else(|| BigInt::from(40));
    let len: i64 = len.try_into().unwrap_or(40);
    let lhs = d.expand_tau(len.max(1));
    let holds = lhs.eq_common(&rhs) && lhs.trunc().is_some();
    Ok(DeltaCheck { ell, r, status: cert.status, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qj::{Generator, Orders};
    use crate::quasimodular::{certify_poly, DEFAULT_MARGIN};

    fn origin_f1(q: i64, w: i64) -> QJ {
        Generator::ThetaInv(0).build(1, Orders { q, w }).unwrap()
    }

    #[test]
    fn f1_coefficients_at_origin() {
        let f1 = origin_f1(20, 6);
        let d = AtOrigin::new(&f1);
        assert_eq!(d.g(&[-1]).unwrap(), QSeries::one());
        let g1 = d.g(&[1]).unwrap();
        let p = certify_poly(&g1, 2, 1, 1, DEFAULT_MARGIN).unwrap();
        assert_eq!(p.depth(), 1);
        let via_trait = InverseThetaAt::new(Translate::single(rat_int(0), rat_int(0)), 6, &rat_int(20)).unwrap();
        for l in -1..5 {
            assert!(via_trait.g(&[l]).unwrap().eq_common(&d.g(&[l]).unwrap()), "ℓ = {l}");
        }
    }

    #[test]
    fn xi_of_f1_vanishes_in_weight_two() {
        let f1 = origin_f1(24, 6);
        let d = AtOrigin::new(&f1);
        let x = xi(&d, &[1], XiVariant::D).unwrap();
        assert!(x.truncate_int(20).is_zero(), "{x}");
        let x0 = xi(&d, &[-1], XiVariant::D).unwrap();
        assert_eq!(x0, d.g(&[-1]).unwrap());
        for l in [1, 3] {
            let x = xi(&d, &[l], XiVariant::Shifted).unwrap();
            let c = certify(&x, 1 + l, 1, 0, DEFAULT_MARGIN).unwrap();
            assert!(c.is_certified(), "ℓ = {l}");
        }
        let x3 = xi(&d, &[3], XiVariant::D).unwrap();
        assert!(certify(&x3, 4, 1, 0, DEFAULT_MARGIN).unwrap().is_certified());
    }

    #[test]
    fn delta_identity_at_origin() {
        let f1 = origin_f1(30, 6);
        let d = AtOrigin::new(&f1);
        for l in -1..=3 {
            for r in 0..=2 {
                let c = check_delta_identity(&d, l, r, true, DEFAULT_MARGIN).unwrap();
                assert!(c.holds, "{c:?}");
            }
        }
    }

    #[test]
    fn delta_identity_at_translates() {
        for x in [Translate::single(rat_int(0), rat(1, 2)), Translate::single(rat(1, 2), rat_int(0))] {
            let d = InverseThetaAt::new(x.clone(), 5, &rat_int(20)).unwrap();
            for l in 0..=3 {
                for r in 0..=2 {
                    let c = check_delta_identity(&d, l, r, false, DEFAULT_MARGIN).unwrap();
                    assert!(c.holds, "{x:?} {c:?}");
                }
            }
        }
    }

    #[test]
    fn elliptic_transformation() {
        for x in [
            Translate::single(rat_int(0), rat_int(0)),
            Translate::single(rat_int(0), rat(1, 2)),
            Translate::single(rat(1, 2), rat_int(0)),
        ] {
            for (xp, ok) in check_elliptic_transformation(&x, &[-1, 0, 1], 4, &rat_int(6)).unwrap() {
                assert!(ok, "{x:?} + {xp:?}");
            }
        }
    }

    #[test]
    fn pochhammer_never_vanishes_in_shifted_variant() {
        for k in 0..12 {
            for r in 0..=(k / 2) as u32 {
                assert!(!rising(&(rat_int(k - r as i64 - 1) - rat(1, 2)), r).is_zero());
            }
        }
    }
}
