//! Jets of the elliptic kernels Θ, 1/Θ, A, E_k, ℘ in w-units.
//!
//! Every jet takes a q-order `t` (coefficients known to O(q^t)) and a w-order
//! `j` (exponents strictly below j are known).

use crate::eisenstein::{e2_quasi, g_hat};
use crate::field::{binomial, rat, Rat};
use crate::qseries::QSeries;
use crate::wseries::WSeries;
use num_bigint::BigInt;

/// Θ̂(w) = w·exp(−Σ_m ĝ_{2m} w^{2m}/(2m)).
pub fn theta_hat(t: i64, j: i64) -> WSeries {
    let n = (j - 1).max(1);
    let mut coeffs = vec![QSeries::zero(); n as usize];
    for m in 1..=(n - 1) / 2 {
        coeffs[2 * m as usize] = g_hat(2 * m as u32, t).scale_rat(&rat(-1, 2 * m));
    }
    WSeries::new(0, coeffs).exp().shift(1).truncate_w(j)
}

/// 1/Θ̂(w) = 1/w + O(w).
pub fn theta_hat_inv(t: i64, j: i64) -> WSeries {
    theta_hat(t, j + 2).invert().expect("Θ̂ has unit lead").truncate_w(j)
}

/// Â(w) = 1/w − Σ_m ĝ_{2m} w^{2m−1}.
pub fn a_hat(t: i64, j: i64) -> WSeries {
    e_hat(1, t, j)
}

/// Ê_k(w) = 1/w^k + (−1)^k Σ_m C(2m−1, k−1) ĝ_{2m} w^{2m−k}.
pub fn e_hat(k: i64, t: i64, j: i64) -> WSeries {
    assert!(k >= 1, "Ê_k needs k ≥ 1");
    let len = (j + k).max(0) as usize;
    let mut coeffs = vec![QSeries::zero(); len];
    if !coeffs.is_empty() {
        coeffs[0] = QSeries::one();
    }
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let mut m = 1;
    while 2 * m - k < j {
        let c = binomial(2 * m - 1, k - 1);
        if c != BigInt::from(0) {
            let idx = (2 * m) as usize;
            coeffs[idx] = g_hat(2 * m as u32, t).scale_rat(&Rat::from_integer(c * sign));
        }
        m += 1;
    }
    WSeries::new(-k, coeffs)
}

/// ℘̂ = Ê₂ − ĝ₂, the Weierstrass function without constant term.
pub fn wp_hat(t: i64, j: i64) -> WSeries {
    let e2 = e_hat(2, t, j);
    e2.add(&WSeries::monomial(0, e2_quasi(t), j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::CycQ;
    use crate::eisenstein::g_series;
    use crate::field::rat_int;

    #[test]
    fn theta_leading_terms() {
        let th = theta_hat(6, 8);
        assert_eq!(th.val(), 1);
        assert!(th.coeff(0).is_zero());
        assert_eq!(th.coeff(1), QSeries::one());
        assert!(th.coeff(2).is_zero());
        // [w³]Θ̂ = −ĝ₂/2 = −𝔾₂
        assert_eq!(th.coeff(3), g_series(2, 6).neg());
        assert_eq!(th.trunc(), 8);
    }

    #[test]
    fn inverse_theta_residue() {
        let inv = theta_hat_inv(6, 6);
        assert_eq!(inv.val(), -1);
        assert_eq!(inv.coeff(-1), QSeries::one());
        assert_eq!(inv.coeff(1), g_series(2, 6));
        assert_eq!(inv.trunc(), 6);
        assert!(inv.mul(&theta_hat(6, 8)).eq_common(&WSeries::monomial(0, QSeries::one(), 7)));
    }

    #[test]
    fn e_k_parity_and_derivatives() {
        for k in 1..6 {
            let e = e_hat(k, 5, 6);
            let parity = if k % 2 == 0 { e.clone() } else { e.neg() };
            assert_eq!(e.reflect(), parity);
            // D_w Ê_k = −k Ê_{k+1}
            let lhs = e.d_w();
            let rhs = e_hat(k + 1, 5, 5).scale_rat(&rat_int(-k));
            assert!(lhs.eq_common(&rhs), "k={k}");
        }
    }

    #[test]
    fn a_is_log_derivative_of_theta() {
        let th = theta_hat(7, 9);
        let lhs = th.d_w().div(&th).unwrap();
        assert!(lhs.eq_common(&a_hat(7, 6)));
    }

    #[test]
    fn wp_has_no_constant_term() {
        let wp = wp_hat(6, 4);
        assert!(wp.coeff(0).is_zero());
        assert_eq!(wp.coeff(2).coeff_int(0).unwrap(), CycQ::from_rat(rat(1, 240)));
    }
}
