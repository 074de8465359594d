//! Exact Gaussian elimination over any [`Field`].

use crate::field::Field;

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum Solution<F> {
    Unique(Vec<F>),
    /// Consistent but with free variables; a particular solution with free variables set to zero.
    Underdetermined(Vec<F>),
    Inconsistent,
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<F: Field>(m: &mut [Vec<F>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].f_is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].f_inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = x.f_mul(&inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].f_is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.f_is_zero() {
                    *x = x.f_sub(&f.f_mul(p));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &[Vec<F>]) -> usize {
    let mut work = m.to_vec();
    rref(&mut work).len()
}

/// Solve `a x = b` for a (possibly non-square) system.
pub fn solve<F: Field>(a: &[Vec<F>], b: &[F]) -> Solution<F> {
    let n = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<F>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&n) {
        return Solution::Inconsistent;
    }
    let mut x = vec![F::f_zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = aug[i][n].clone();
    }
    if pivots.len() == n {
        Solution::Unique(x)
    } else {
        Solution::Underdetermined(x)
    }
}

/// Basis of the right null space of `a`.
pub fn nullspace<F: Field>(a: &[Vec<F>]) -> Vec<Vec<F>> {
    let n = a.first().map_or(0, |r| r.len());
    let mut work = a.to_vec();
    let pivots = rref(&mut work);
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::f_zero(); n];
        v[free] = F::f_one();
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = work[i][free].f_neg();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, rat_int, Rat};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect()
    }

    #[test]
    fn unique_solution() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let b = vec![rat_int(3), rat_int(5)];
        assert_eq!(solve(&a, &b), Solution::Unique(vec![rat(4, 5), rat(7, 5)]));
    }

    #[test]
    fn inconsistent_and_free() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve(&a, &[rat_int(1), rat_int(3)]), Solution::Inconsistent);
        assert!(matches!(solve(&a, &[rat_int(1), rat_int(2)]), Solution::Underdetermined(_)));
    }

    #[test]
    fn overdetermined_consistent() {
        let a = m(&[&[1, 0], &[0, 1], &[1, 1]]);
        let b = vec![rat_int(2), rat_int(3), rat_int(5)];
        assert_eq!(solve(&a, &b), Solution::Unique(vec![rat_int(2), rat_int(3)]));
    }

    #[test]
    fn kernel_vectors_are_killed() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 2);
        for v in ns {
            for row in &a {
                let s: Rat = row.iter().zip(&v).map(|(x, y)| x * y).sum();
                assert_eq!(s, rat_int(0));
            }
        }
    }
}
