//! Solvers and coverage checked against slow, independent reference
//! implementations built on a dense boolean reachability matrix.

// Reference implementations index dense matrices directly on purpose.
#![allow(clippy::needless_range_loop)]

use std::collections::BTreeSet;

use kdcover::gen::{derive_seed, erdos_renyi, GenSpec};
use kdcover::graph::{coverage_rate, d_coverage, d_coverage_of_set, Graph, SeedSet};
use kdcover::solvers::{
    brute_force, celf, greedy_one, naive_greedy, solve, top_k_by_score, Algorithm, BruteForceBudget, CoverageIndex,
    Limits, SolveOptions,
};
use proptest::prelude::*;

/// `reach[u][v]` iff `v` is within `d` hops of `u`, from `(I + A)^d`.
fn reach_matrix(g: &Graph, d: usize) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut step = vec![vec![false; n]; n];
    for (u, row) in step.iter_mut().enumerate() {
        row[u] = true;
    }
    for (u, v) in g.arcs() {
        step[u][v] = true;
    }
    let mut r = step.clone();
    for _ in 1..d {
        let mut next = vec![vec![false; n]; n];
        for u in 0..n {
            for w in 0..n {
                if r[u][w] {
                    for v in 0..n {
                        next[u][v] |= step[w][v];
                    }
                }
            }
        }
        r = next;
    }
    r
}

fn covered_by(reach: &[Vec<bool>], seeds: &[usize]) -> BTreeSet<usize> {
    seeds
        .iter()
        .flat_map(|&s| reach[s].iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v))
        .collect()
}

/// Greedy written from scratch: recompute every gain, smallest id wins ties.
fn reference_greedy(reach: &[Vec<bool>], k: usize) -> Vec<usize> {
    let n = reach.len();
    let mut picked = Vec::new();
    let mut covered = BTreeSet::new();
    while picked.len() < k && covered.len() < n {
        let (best, _) = (0..n)
            .filter(|u| !picked.contains(u))
            .map(|u| (u, (0..n).filter(|&v| reach[u][v] && !covered.contains(&v)).count()))
            .fold((usize::MAX, 0), |acc, (u, gain)| if acc.0 == usize::MAX || gain > acc.1 { (u, gain) } else { acc });
        picked.push(best);
        covered.extend((0..n).filter(|&v| reach[best][v]));
    }
    picked
}

/// Best coverage over all subsets of size `min(k, n)`, by recursion.
fn reference_optimum(reach: &[Vec<bool>], k: usize) -> usize {
    fn go(reach: &[Vec<bool>], start: usize, left: usize, chosen: &mut Vec<usize>) -> usize {
        if left == 0 {
            return covered_by(reach, chosen).len();
        }
        (start..=reach.len() - left)
            .map(|u| {
                chosen.push(u);
                let best = go(reach, u + 1, left - 1, chosen);
                chosen.pop();
                best
            })
            .max()
            .unwrap_or(0)
    }
    go(reach, 0, k.min(reach.len()), &mut Vec::new())
}

fn instance(i: u64, max_n: usize) -> Graph {
    let seed = derive_seed(0xC0FFEE, i);
    let n = 2 + (seed % (max_n as u64 - 1)) as usize;
    let p = [0.05, 0.1, 0.2, 0.35][(seed >> 8) as usize % 4];
    let directed = !(seed >> 16).is_multiple_of(3);
    erdos_renyi(&GenSpec { n, p, seed, directed }).unwrap()
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..4 * n)
            .prop_map(move |arcs| Graph::from_arcs(n, arcs.into_iter().filter(|(u, v)| u != v)).unwrap())
    })
}

#[test]
fn bfs_coverage_matches_matrix_powers() {
    for i in 0..60 {
        let g = instance(i, 40);
        for d in 1..=4 {
            let reach = reach_matrix(&g, d);
            for u in 0..g.n() {
                let want: Vec<usize> = (0..g.n()).filter(|&v| reach[u][v]).collect();
                assert_eq!(d_coverage(&g, u, d).as_slice(), want.as_slice(), "graph {i} u={u} d={d}");
            }
            let index = CoverageIndex::build(&g, d);
            for u in 0..g.n() {
                let mut got: Vec<usize> = index.coverage(u).iter().map(|&v| v as usize).collect();
                got.sort_unstable();
                let want: Vec<usize> = (0..g.n()).filter(|&v| reach[u][v]).collect();
                assert_eq!(got, want);
            }
        }
    }
}

#[test]
fn greedy_family_matches_reference_greedy() {
    for i in 0..80 {
        let g = instance(i, 30);
        for d in 1..=3 {
            let reach = reach_matrix(&g, d);
            for k in [1, 2, 5] {
                let want = reference_greedy(&reach, k);
                let greedy = naive_greedy(&g, k.min(g.n()), d, &Limits::none()).unwrap();
                let lazy = celf(&g, k.min(g.n()), d, &Limits::none()).unwrap();
                assert_eq!(greedy.seeds, want, "graph {i} d={d} k={k}");
                assert_eq!(lazy.seeds, want, "graph {i} d={d} k={k}");
                assert_eq!(greedy.covered(), covered_by(&reach, &want).len());
            }
        }
    }
}

#[test]
fn brute_force_matches_exhaustive_recursion() {
    for i in 0..120 {
        let g = instance(i, 11);
        for d in 1..=2 {
            let reach = reach_matrix(&g, d);
            for k in 1..=3 {
                let best = brute_force(&g, k, d, &BruteForceBudget::default()).unwrap();
                assert_eq!(best.covered(), reference_optimum(&reach, k), "graph {i} d={d} k={k}");
                assert_eq!(best.len(), k.min(g.n()));
            }
        }
    }
}

#[test]
fn greedy_one_ranks_by_one_hop_gain() {
    for i in 0..40 {
        let g = instance(i, 30);
        let one_hop = reach_matrix(&g, 1);
        let want = reference_greedy(&one_hop, 4);
        for d in 1..=3 {
            let got = greedy_one(&g, 4.min(g.n()), d, &Limits::none()).unwrap();
            // Same picks as plain 1-hop greedy, reported with d-hop gains.
            assert_eq!(got.seeds, want[..got.seeds.len()]);
            assert_eq!(got, SeedSet::with_gains(&g, got.seeds.clone(), d));
        }
    }
}

#[test]
fn greedy_one_is_close_to_celf_at_two_hops() {
    let mut ratio = 0.0;
    for i in 0..5 {
        let g = erdos_renyi(&GenSpec::directed(1000, 0.01, derive_seed(11, i))).unwrap();
        let a = greedy_one(&g, 16, 2, &Limits::none()).unwrap();
        let b = celf(&g, 16, 2, &Limits::none()).unwrap();
        ratio += a.covered() as f64 / b.covered() as f64 / 5.0;
    }
    assert!(ratio > 0.9, "greedy-1 / celf = {ratio}");
}

#[test]
fn top_k_ties_go_to_smaller_ids() {
    assert_eq!(top_k_by_score(&[0.5, 0.9, 0.5, 0.9, 0.1], 3), vec![1, 3, 0]);
    assert_eq!(top_k_by_score(&[1.0; 4], 2), vec![0, 1]);
    assert_eq!(top_k_by_score(&[0.3, 0.2], 5), vec![0, 1]);
}

#[test]
fn dispatch_honours_limits() {
    let g = erdos_renyi(&GenSpec::directed(400, 0.02, 5)).unwrap();
    let capped = SolveOptions { limits: Limits::none().with_memory_cap(100), ..Default::default() };
    let err = solve(Algorithm::Celf, &g, 8, 3, &capped).unwrap_err();
    assert!(err.is_resource_limit());
    let tiny = SolveOptions { limits: Limits::none().with_time_limit(std::time::Duration::ZERO), ..Default::default() };
    assert!(solve(Algorithm::Greedy, &g, 8, 3, &tiny).unwrap_err().is_resource_limit());
    assert!(solve(Algorithm::Brute, &g, 3, 1, &SolveOptions::default()).is_err());
    assert!(solve(Algorithm::FastCover, &g, 3, 1, &SolveOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn coverage_grows_with_hops(g in arb_graph(25), u in 0usize..25) {
        let u = u % g.n();
        let mut prev = d_coverage(&g, u, 0);
        prop_assert_eq!(prev.as_slice(), &[u]);
        for d in 1..=5 {
            let next = d_coverage(&g, u, d);
            prop_assert!(prev.iter().all(|v| next.contains(v)));
            prev = next;
        }
    }

    #[test]
    fn reversal_swaps_coverer_and_covered(g in arb_graph(20), d in 1usize..4) {
        let rev = g.reverse();
        for u in 0..g.n() {
            let fwd = d_coverage(&g, u, d);
            for v in 0..g.n() {
                prop_assert_eq!(fwd.contains(v), d_coverage(&rev, v, d).contains(u));
            }
        }
    }

    #[test]
    fn adding_seeds_never_loses_coverage(g in arb_graph(25), seeds in proptest::collection::vec(0usize..25, 1..6), d in 1usize..4) {
        let seeds: Vec<usize> = seeds.into_iter().map(|s| s % g.n()).collect();
        for cut in 0..seeds.len() {
            let small = d_coverage_of_set(&g, &seeds[..cut], d);
            let large = d_coverage_of_set(&g, &seeds[..=cut], d);
            prop_assert!(small.iter().all(|v| large.contains(v)));
            prop_assert!(coverage_rate(&g, &seeds[..cut], d) <= coverage_rate(&g, &seeds[..=cut], d));
        }
    }

    #[test]
    fn celf_coverage_is_monotone_in_k(g in arb_graph(30), d in 1usize..4) {
        let mut prev = 0.0;
        for k in 1..=g.n().min(6) {
            let s = celf(&g, k, d, &Limits::none()).unwrap();
            let c = coverage_rate(&g, &s.seeds, d);
            prop_assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn gains_are_non_increasing_for_greedy(g in arb_graph(30), d in 1usize..4, k in 1usize..8) {
        let s = celf(&g, k.min(g.n()), d, &Limits::none()).unwrap();
        prop_assert!(s.gains.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.gains.iter().all(|&x| x > 0));
    }
}
