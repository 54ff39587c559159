use std::collections::BTreeSet;

use crate::net::{FiringSequence, Transition};

/// The order in which the transitions of `subset` occur in `base^∞`.
///
/// Positions refer to the infinite repetition of `base` and are computed from
/// one index pass over `base`; nothing is unrolled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalOrdering {
    base: FiringSequence,
    subset: BTreeSet<Transition>,
    /// positions of each transition inside one copy of `base`
    occ: Vec<Vec<usize>>,
}

impl LocalOrdering {
    pub fn new(base: &[Transition], subset: impl IntoIterator<Item = Transition>) -> Self {
        let width = base.iter().max().map_or(0, |&t| t + 1);
        let mut occ = vec![Vec::new(); width];
        for (i, &t) in base.iter().enumerate() {
            occ[t].push(i);
        }
        LocalOrdering {
            base: FiringSequence(base.to_vec()),
            subset: subset.into_iter().collect(),
            occ,
        }
    }

    pub fn base(&self) -> &FiringSequence {
        &self.base
    }

    pub fn subset(&self) -> &BTreeSet<Transition> {
        &self.subset
    }

    fn occurrences(&self, t: Transition) -> &[usize] {
        self.occ.get(t).map_or(&[], Vec::as_slice)
    }

    /// Index in `base^∞` of the `m`-th occurrence of `t` (`m ≥ 1`), or `None`
    /// if `t` never occurs.
    pub fn position(&self, t: Transition, m: u64) -> Option<u64> {
        let occ = self.occurrences(t);
        if occ.is_empty() || m == 0 {
            return None;
        }
        let k = occ.len() as u64;
        let round = (m - 1) / k;
        Some(round * self.base.len() as u64 + occ[((m - 1) % k) as usize] as u64)
    }

    /// Occurrences of `t` strictly before index `pos` of `base^∞`.
    pub fn count_before(&self, t: Transition, pos: u64) -> u64 {
        let occ = self.occurrences(t);
        let len = self.base.len() as u64;
        if len == 0 {
            return 0;
        }
        let rest = (pos % len) as usize;
        (pos / len) * occ.len() as u64 + occ.partition_point(|&i| i < rest) as u64
    }

    /// `P(K_{t'}^n(τ))(t)` for the projection `τ` of `base^∞` on the subset.
    pub fn prefix_count(&self, t_prime: Transition, n: u64, t: Transition) -> Option<u64> {
        self.position(t_prime, n).map(|pos| self.count_before(t, pos))
    }

    /// The first `len` symbols of the projection of `base^∞` on the subset.
    pub fn projection(&self, len: usize) -> Vec<Transition> {
        if !self.base.iter().any(|t| self.subset.contains(t)) {
            return Vec::new();
        }
        self.base
            .iter()
            .copied()
            .cycle()
            .filter(|t| self.subset.contains(t))
            .take(len)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_wrap_around() {
        // a b a c
        let o = LocalOrdering::new(&[0, 1, 0, 2], [0, 1, 2]);
        assert_eq!(o.position(0, 1), Some(0));
        assert_eq!(o.position(0, 2), Some(2));
        assert_eq!(o.position(0, 3), Some(4));
        assert_eq!(o.position(2, 3), Some(11));
        assert_eq!(o.position(3, 1), None);
        assert_eq!(o.count_before(0, 5), 3);
        assert_eq!(o.count_before(2, 11), 2);
        assert_eq!(o.prefix_count(2, 1, 0), Some(2));
    }

    #[test]
    fn projection_matches_unrolled_filter() {
        let base = [1, 0, 2, 3, 4, 1, 2, 4, 2, 1, 0, 1, 3, 4, 2];
        let o = LocalOrdering::new(&base, [1, 2]);
        let unrolled: Vec<Transition> = base.iter().chain(&base).copied().filter(|t| *t == 1 || *t == 2).collect();
        assert_eq!(o.projection(16), unrolled);
        for t in [1, 2] {
            for n in 1..=8u64 {
                let pos = o.position(t, n).unwrap() as usize;
                let direct = base.iter().chain(&base).take(pos).filter(|&&u| u == 0).count() as u64;
                assert_eq!(o.prefix_count(t, n, 0), Some(direct));
            }
        }
    }
}
