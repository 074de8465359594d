//! Integer partitions with cached statistics, enumerated size by size.

use std::fmt;

/// A partition stored as weakly decreasing parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
    size: u32,
    mult: Vec<u32>,
    hooks: Vec<u32>,
}

impl Partition {
    /// Build from parts in any order; zero parts are dropped.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let size = parts.iter().sum();
        let largest = parts.first().copied().unwrap_or(0) as usize;
        let mut mult = vec![0u32; largest + 1];
        for &p in &parts {
            mult[p as usize] += 1;
        }
        let conj: Vec<u32> = (1..=largest as u32).map(|j| parts.iter().filter(|&&p| p >= j).count() as u32).collect();
        let mut hooks = Vec::with_capacity(size as usize);
        for (i, &row) in parts.iter().enumerate() {
            for j in 0..row as usize {
                hooks.push(row - j as u32 + conj[j] - i as u32 - 1);
            }
        }
        hooks.sort_unstable();
        Partition { parts, size, mult, hooks }
    }

    pub fn empty() -> Self {
        Self::new(vec![])
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of parts equal to m.
    pub fn multiplicity(&self, m: u32) -> u32 {
        self.mult.get(m as usize).copied().unwrap_or(0)
    }

    /// Distinct part sizes with their multiplicities.
    pub fn multiplicities(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.mult.iter().enumerate().filter(|(_, &r)| r > 0).map(|(m, &r)| (m as u32, r))
    }

    /// Hook lengths of all cells, ascending.
    pub fn hooks(&self) -> &[u32] {
        &self.hooks
    }

    /// The i-th content-like value λ_i − i (1-based i).
    pub fn shifted(&self, i: usize) -> i64 {
        self.parts.get(i - 1).copied().unwrap_or(0) as i64 - i as i64
    }

    /// Multiset union.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut p = self.parts.clone();
        p.extend_from_slice(&other.parts);
        Partition::new(p)
    }

    /// All sub-multisets of the parts.
    pub fn sub_partitions(&self) -> Vec<Partition> {
        let mut out = vec![Vec::new()];
        for (m, r) in self.multiplicities() {
            let mut next = Vec::new();
            for base in &out {
                for c in 0..=r {
                    let mut v: Vec<u32> = base.clone();
                    v.extend(std::iter::repeat_n(m, c as usize));
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(Partition::new).collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Partitions of n in reverse lexicographic order: (n), (n−1,1), ..., (1^n).
pub fn partitions_of(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Partition::empty());
        return out;
    }
    let mut a: Vec<u32> = vec![n];
    loop {
        out.push(Partition::new(a.clone()));
        // strip trailing ones, then decrease the last part larger than one
        let ones = a.iter().rev().take_while(|&&x| x == 1).count() as u32;
        a.truncate(a.len() - ones as usize);
        let Some(last) = a.pop() else { break };
        let k = last - 1;
        let mut rest = ones + 1;
        a.push(k);
        while rest > k {
            a.push(k);
            rest -= k;
        }
        if rest > 0 {
            a.push(rest);
        }
    }
    out
}

/// Every partition of size ≤ n_max, graded by size, reverse lex within a size.
pub fn enumerate_partitions(n_max: u32) -> impl Iterator<Item = Partition> {
    (0..=n_max).flat_map(partitions_of)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_partition_numbers() {
        let counts: Vec<usize> = (0..=10).map(|n| partitions_of(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
        assert_eq!(enumerate_partitions(0).count(), 1);
    }

    #[test]
    fn reverse_lex_order() {
        let p: Vec<String> = partitions_of(4).iter().map(|p| p.to_string()).collect();
        assert_eq!(p, vec!["(4)", "(3,1)", "(2,2)", "(2,1,1)", "(1,1,1,1)"]);
    }

    #[test]
    fn no_duplicates() {
        let mut all: Vec<Partition> = partitions_of(12);
        let n = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), n);
    }

    #[test]
    fn hooks_and_multiplicities() {
        let p = Partition::new(vec![1, 3, 1]);
        assert_eq!(p.parts(), &[3, 1, 1]);
        assert_eq!(p.hooks(), &[1, 1, 2, 2, 5]);
        assert_eq!(p.multiplicity(1), 2);
        let total: u32 = p.multiplicities().map(|(m, r)| m * r).sum();
        assert_eq!(total, p.size());
        for q in partitions_of(9) {
            assert_eq!(q.hooks().len() as u32, q.size());
        }
    }

    #[test]
    fn sub_multisets() {
        let p = Partition::new(vec![2, 1, 1]);
        assert_eq!(p.sub_partitions().len(), 6);
    }
}
