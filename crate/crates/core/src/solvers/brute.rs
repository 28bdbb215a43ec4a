use fixedbitset::FixedBitSet;

use super::{SolveError};
use crate::graph::{d_coverage, Graph, SeedSet};

/// Upper bound on the number of seed subsets [`brute_force`] will enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceBudget {
    pub max_combinations: u128,
}

impl Default for BruteForceBudget {
    /// C(14, 4) = 1001: every instance with n <= 14 and k <= 4 fits.
    fn default() -> Self {
        BruteForceBudget { max_combinations: binomial(14, 4) }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Exhaustive search over all subsets of size `min(k, n)`. Returns the
/// lexicographically first subset of maximum d-coverage.
pub fn brute_force(
    g: &Graph,
    k: usize,
    d: usize,
    budget: &BruteForceBudget,
) -> Result<SeedSet, SolveError> {
    let n = g.n();
    if k == 0 {
        return Err(SolveError::InvalidBudget { k, n });
    }
    let k = k.min(n);
    let combinations = binomial(n, k);
    if combinations > budget.max_combinations {
        return Err(SolveError::TooManyCombinations { combinations, max: budget.max_combinations });
    }
    let masks: Vec<FixedBitSet> = (0..n).map(|u| d_coverage(g, u, d).mask().clone()).collect();

    let mut combo: Vec<usize> = (0..k).collect();
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut acc = FixedBitSet::with_capacity(n);
    loop {
        acc.clear();
        for &u in &combo {
            acc.union_with(&masks[u]);
        }
        let value = acc.count_ones(..);
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, combo.clone()));
        }
        // Advance to the next combination in lexicographic order.
        let Some(i) = (0..k).rev().find(|&i| combo[i] < n - k + i) else { break };
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
    let (_, seeds) = best.expect("at least one combination");
    Ok(SeedSet::with_gains(g, seeds, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(14, 4), 1001);
        assert_eq!(binomial(5, 5), 1);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(12, 3), 220);
    }

    #[test]
    fn k_equals_n_takes_everything() {
        let g = Graph::from_arcs(6, [(0, 1), (2, 3)]).unwrap();
        let s = brute_force(&g, 6, 1, &BruteForceBudget::default()).unwrap();
        assert_eq!(s.seeds, (0..6).collect::<Vec<_>>());
        assert_eq!(s.covered(), 6);
    }

    #[test]
    fn k_one_is_argmax() {
        let g = Graph::from_arcs(6, [(0, 1), (2, 3), (2, 4), (5, 2)]).unwrap();
        let s = brute_force(&g, 1, 2, &BruteForceBudget::default()).unwrap();
        // 5 reaches {5, 2, 3, 4}; 2 reaches {2, 3, 4}.
        assert_eq!(s.seeds, vec![5]);
        assert_eq!(s.covered(), 4);
    }

    #[test]
    fn budget_exceeded() {
        let g = Graph::from_arcs(30, [(0, 1)]).unwrap();
        let err = brute_force(&g, 5, 1, &BruteForceBudget::default()).unwrap_err();
        assert!(matches!(err, SolveError::TooManyCombinations { .. }));
    }
}
