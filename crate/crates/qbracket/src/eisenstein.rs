//! Eisenstein series 𝔾_k and the hatted constants ĝ_k as q-series.

use crate::constants::bernoulli_constant;
use crate::cyclotomic::CycQ;
use crate::field::{factorial, rat_int, Rat};
use crate::qseries::{sigma, QSeries};
use num_bigint::BigInt;

/// 𝔾_k = −B_k/(2k) + Σ_{n≥1} σ_{k−1}(n) q^n to O(q^t), k ≥ 2 even.
pub fn g_series(k: u32, t: i64) -> QSeries {
    assert!(k >= 2 && k.is_multiple_of(2), "𝔾_k needs even k ≥ 2");
    let mut coeffs = Vec::with_capacity(t.max(0) as usize);
    for n in 0..t {
        let c = if n == 0 { bernoulli_constant(k as usize) } else { Rat::from_integer(sigma(k - 1, n as u64)) };
        coeffs.push(CycQ::from_rat(c));
    }
    QSeries::from_coeffs(coeffs)
}

/// 𝔾_k(dτ) to O(q^t).
pub fn g_series_scaled(k: u32, d: u64, t: i64) -> QSeries {
    let inner = (t + d as i64 - 1) / d as i64;
    g_series(k, inner.max(1)).rescale(&rat_int(d as i64)).truncate_int(t)
}

/// 𝕖₂ = −2𝔾₂ = 1/12 − 2Σ σ₁(n) q^n.
pub fn e2_quasi(t: i64) -> QSeries {
    g_series(2, t).scale_rat(&rat_int(-2))
}

/// ĝ_k = 2𝔾_k/(k−1)!, the w-unit Eisenstein constants (ĝ₂ = −𝕖₂).
pub fn g_hat(k: u32, t: i64) -> QSeries {
    let f = Rat::new(BigInt::from(2), factorial(k as u64 - 1));
    g_series(k, t).scale_rat(&f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    #[test]
    fn leading_terms() {
        let g2 = g_series(2, 4);
        assert_eq!(g2.coeff_int(0).unwrap(), CycQ::from_rat(rat(-1, 24)));
        assert_eq!(g2.coeff_int(3).unwrap(), CycQ::from_int(4));
        let g4 = g_series(4, 3);
        assert_eq!(g4.coeff_int(0).unwrap(), CycQ::from_rat(rat(1, 240)));
        assert_eq!(g4.coeff_int(2).unwrap(), CycQ::from_int(9));
        let e2 = e2_quasi(3);
        assert_eq!(e2.coeff_int(0).unwrap(), CycQ::from_rat(rat(1, 12)));
        assert_eq!(e2.coeff_int(1).unwrap(), CycQ::from_int(-2));
    }

    #[test]
    fn g8_is_multiple_of_g4_squared() {
        let g4 = g_series(4, 10);
        let g8 = g_series(8, 10);
        let e4 = g4.scale_rat(&rat(240, 1));
        let e8 = g8.scale_rat(&rat(480, 1));
        assert_eq!(e4.mul(&e4), e8);
    }

    #[test]
    fn scaled_series() {
        let s = g_series_scaled(2, 2, 5);
        assert_eq!(s.coeff_int(1).unwrap(), CycQ::zero());
        assert_eq!(s.coeff_int(2).unwrap(), CycQ::one());
        assert_eq!(s.coeff_int(4).unwrap(), CycQ::from_int(3));
    }
}
