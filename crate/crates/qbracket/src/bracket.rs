//! q-brackets, u-brackets and the induced product ⊙.

use crate::cyclotomic::CycQ;
use crate::families::{FamilyError, PartitionFunction};
use crate::field::rat_int;
use crate::partition::{enumerate_partitions, partitions_of, Partition};
use crate::qseries::{euler_product, QSeries};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// ⟨f⟩_q to O(q^(t+1)); only partitions of size ≤ t are evaluated.
pub fn qbracket(f: &PartitionFunction, t: u32) -> Result<QSeries, FamilyError> {
    Ok(qbrackets(std::slice::from_ref(f), t)?.remove(0))
}

/// Several q-brackets from a single partition sweep, parallel over sizes.
pub fn qbrackets(fs: &[PartitionFunction], t: u32) -> Result<Vec<QSeries>, FamilyError> {
    let per_size: Vec<Vec<CycQ>> = (0..=t)
        .into_par_iter()
        .map(|n| {
            let parts = partitions_of(n);
            fs.iter()
                .map(|f| {
                    let mut acc = CycQ::zero();
                    for p in &parts {
                        acc += &f.eval(p)?;
                    }
                    Ok(acc)
                })
                .collect::<Result<Vec<CycQ>, FamilyError>>()
        })
        .collect::<Result<_, _>>()?;
    let euler = euler_product(t as i64 + 1);
    Ok((0..fs.len())
        .map(|i| {
            let numer = QSeries::from_coeffs(per_size.iter().map(|row| row[i].clone()).collect());
            numer.mul(&euler)
        })
        .collect())
}

/// Σ c_λ u_λ over partitions of size ≤ trunc_size.
#[derive(Clone, Debug, PartialEq)]
pub struct USeries {
    trunc_size: u32,
    coeffs: BTreeMap<Vec<u32>, CycQ>,
}

impl USeries {
    pub fn trunc_size(&self) -> u32 {
        self.trunc_size
    }

    pub fn coeff(&self, p: &Partition) -> CycQ {
        self.coeffs.get(p.parts()).cloned().unwrap_or_else(CycQ::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &CycQ)> {
        self.coeffs.iter()
    }

    fn from_map(trunc_size: u32, mut coeffs: BTreeMap<Vec<u32>, CycQ>) -> Self {
        coeffs.retain(|k, c| !c.is_zero() && k.iter().sum::<u32>() <= trunc_size);
        USeries { trunc_size, coeffs }
    }

    /// Π_m (1 − u_m) = Σ over distinct-part λ of (−1)^ℓ(λ) u_λ.
    pub fn inverse_partition_series(n: u32) -> Self {
        let map = enumerate_partitions(n)
            .filter(|p| p.multiplicities().all(|(_, r)| r == 1))
            .map(|p| {
                let sign = if p.len() % 2 == 0 { 1 } else { -1 };
                (p.parts().to_vec(), CycQ::from_int(sign))
            })
            .collect();
        Self::from_map(n, map)
    }

    /// Σ_λ u_λ.
    pub fn partition_series(n: u32) -> Self {
        Self::from_map(n, enumerate_partitions(n).map(|p| (p.parts().to_vec(), CycQ::one())).collect())
    }

    pub fn mul(&self, other: &USeries) -> USeries {
        let n = self.trunc_size.min(other.trunc_size);
        let mut out: BTreeMap<Vec<u32>, CycQ> = BTreeMap::new();
        for (a, ca) in &self.coeffs {
            let sa: u32 = a.iter().sum();
            for (b, cb) in &other.coeffs {
                if sa + b.iter().sum::<u32>() > n {
                    continue;
                }
                let mut key = a.clone();
                key.extend_from_slice(b);
                key.sort_unstable_by(|x, y| y.cmp(x));
                let e = out.entry(key).or_insert_with(CycQ::zero);
                *e += &(ca * cb);
            }
        }
        Self::from_map(n, out)
    }

    /// u_m ↦ q^m.
    pub fn specialize(&self) -> QSeries {
        let mut coeffs = vec![CycQ::zero(); self.trunc_size as usize + 1];
        for (k, c) in &self.coeffs {
            coeffs[k.iter().sum::<u32>() as usize] += c;
        }
        QSeries::from_coeffs(coeffs)
    }
}

/// ⟨f⟩_u = (Σ f(λ) u_λ)(Σ u_λ)^{−1} to partition size n.
pub fn ubracket(f: &PartitionFunction, n: u32) -> Result<USeries, FamilyError> {
    let mut numer = BTreeMap::new();
    for p in enumerate_partitions(n) {
        numer.insert(p.parts().to_vec(), f.eval(&p)?);
    }
    Ok(USeries::from_map(n, numer).mul(&USeries::inverse_partition_series(n)))
}

/// Recover the partition function whose u-bracket is `u` (on sizes ≤ its trunc).
pub fn from_ubracket(u: &USeries, tag: impl Into<String>, weight: i64, level: u64) -> PartitionFunction {
    let n = u.trunc_size;
    let table: BTreeMap<Vec<u32>, CycQ> = u.mul(&USeries::partition_series(n)).coeffs;
    let table = Arc::new(table);
    PartitionFunction::new(tag, weight, level, move |p| {
        if p.size() > n {
            return Err(FamilyError::TruncExceeded { bound: n, size: p.size() });
        }
        Ok(table.get(p.parts()).cloned().unwrap_or_else(CycQ::zero))
    })
}

/// The induced product f ⊙ g, defined on partitions of size ≤ n.
pub fn odot(f: &PartitionFunction, g: &PartitionFunction, n: u32) -> Result<PartitionFunction, FamilyError> {
    let prod = ubracket(f, n)?.mul(&ubracket(g, n)?);
    let tag = format!("{}⊙{}", f.tag(), g.tag());
    Ok(from_ubracket(&prod, tag, f.weight() + g.weight(), num_integer::lcm(f.level(), g.level())))
}

/// f_1 ⊙ ... ⊙ f_r (empty product is 1).
pub fn odot_all(fs: &[PartitionFunction], n: u32) -> Result<PartitionFunction, FamilyError> {
    let mut u = USeries::from_map(n, [(vec![], CycQ::one())].into_iter().collect());
    for f in fs {
        u = u.mul(&ubracket(f, n)?);
    }
    let tag = fs.iter().map(|f| f.tag().to_string()).collect::<Vec<_>>().join("⊙");
    let weight = fs.iter().map(|f| f.weight()).sum();
    let level = fs.iter().fold(1u64, |l, f| num_integer::lcm(l, f.level()));
    Ok(from_ubracket(&u, if tag.is_empty() { "1".into() } else { tag }, weight, level))
}

/// The u-bracket specialized to a q-series: ⟨f⟩_q to O(q^(n+1)).
pub fn qbracket_via_u(f: &PartitionFunction, n: u32) -> Result<QSeries, FamilyError> {
    Ok(ubracket(f, n)?.specialize().truncate(&rat_int(n as i64 + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::{e2_quasi, g_series};
    use crate::families::Family;
    use crate::field::rat;

    fn q(k: i64) -> PartitionFunction {
        Family::q(k).function().unwrap()
    }

    #[test]
    fn q2_bracket_example() {
        let s = qbracket(&q(2), 4).unwrap();
        let expected = QSeries::from_rats(&[rat(-1, 24), rat(1, 1), rat(3, 1), rat(4, 1), rat(7, 1)]);
        assert_eq!(s, expected);
        assert_eq!(s, g_series(2, 5));
    }

    #[test]
    fn constant_brackets() {
        assert_eq!(qbracket(&PartitionFunction::one(), 5).unwrap(), QSeries::one().truncate_int(6));
        let f = Family::qa(1, rat(1, 2)).function().unwrap();
        let s = qbracket(&f, 0).unwrap();
        assert_eq!(s.coeff_int(0).unwrap(), CycQ::from_rat(rat(-1, 2)));
    }

    #[test]
    fn u_bracket_first_order() {
        let f = Family::q(3).function().unwrap();
        let u = ubracket(&f, 4).unwrap();
        let one = Partition::new(vec![1]);
        let expected = &f.eval(&one).unwrap() - &f.eval(&Partition::empty()).unwrap();
        assert_eq!(u.coeff(&one), expected);
        assert_eq!(ubracket(&PartitionFunction::one(), 4).unwrap().terms().count(), 1);
    }

    #[test]
    fn u_specializes_to_q() {
        for f in [q(2), q(4), q(3).mul(&q(3))] {
            assert_eq!(qbracket_via_u(&f, 6).unwrap(), qbracket(&f, 6).unwrap());
        }
    }

    #[test]
    fn odot_unit_and_factorization() {
        let f = q(3).mul(&q(2));
        let h = odot(&f, &PartitionFunction::one(), 6).unwrap();
        for p in enumerate_partitions(6) {
            assert_eq!(h.eval(&p).unwrap(), f.eval(&p).unwrap());
        }
        assert!(matches!(h.eval(&Partition::new(vec![7])), Err(FamilyError::TruncExceeded { .. })));
        let g = Family::t(1, 1).function().unwrap();
        let fg = odot(&f, &g, 6).unwrap();
        let lhs = ubracket(&fg, 6).unwrap();
        let rhs = ubracket(&f, 6).unwrap().mul(&ubracket(&g, 6).unwrap());
        assert_eq!(lhs, rhs);
        let fq = qbracket(&fg, 6).unwrap();
        assert_eq!(fq, qbracket(&f, 6).unwrap().mul(&qbracket(&g, 6).unwrap()));
    }

    #[test]
    fn pointwise_product_does_not_factor() {
        let a = qbracket(&q(2).mul(&q(2)), 4).unwrap();
        let b = qbracket(&q(2), 4).unwrap().pow(2);
        assert_ne!(a, b);
    }

    #[test]
    fn multiplication_by_q2_is_d_plus_g2() {
        let t = 8;
        let g2 = g_series(2, t as i64 + 1);
        for f in [PartitionFunction::one(), q(2), q(4), q(2).mul(&q(2))] {
            let lhs = qbracket(&q(2).mul(&f), t).unwrap();
            let bf = qbracket(&f, t).unwrap();
            assert_eq!(lhs, bf.d_tau().add(&g2.mul(&bf)));
            // the variant with +𝕖₂ in place of 𝔾₂ does not hold
            let wrong = bf.d_tau().add(&e2_quasi(t as i64 + 1).mul(&bf));
            assert_ne!(lhs, wrong);
        }
    }

    #[test]
    fn odot_with_t11_multiplies_by_g2() {
        let t = 7;
        let t11 = Family::t(1, 1).function().unwrap();
        let g2 = g_series(2, t as i64 + 1);
        assert_eq!(qbracket(&t11, t).unwrap(), g2);
        for f in [q(2), q(3).mul(&q(3)), Family::t(2, 2).function().unwrap()] {
            let lhs = qbracket(&odot(&t11, &f, t).unwrap(), t).unwrap();
            let bf = qbracket(&f, t).unwrap();
            assert_eq!(lhs, g2.mul(&bf));
            assert_ne!(lhs, e2_quasi(t as i64 + 1).scale_rat(&rat(-2, 1)).mul(&bf));
        }
    }

    #[test]
    fn bracket_ignores_values_above_order() {
        let f = q(4);
        let g = {
            let f = f.clone();
            PartitionFunction::new("perturbed", 4, 1, move |p| {
                let v = f.eval(p)?;
                Ok(if p.size() > 5 { &v + &CycQ::from_int(1000) } else { v })
            })
        };
        assert_eq!(qbracket(&f, 5).unwrap(), qbracket(&g, 5).unwrap());
    }
}
