//! Probabilistic coverage loss.
//!
//! Treat `p_v` as the independent probability that `v` is a seed. Vertex `u`
//! stays uncovered only if none of its d-hop coverers is picked, so
//!
//! ```text
//! L(p) = sum_u prod_{v covers u} (1 - p_v) + lambda * sum_v p_v
//! ```
//!
//! is the expected number of uncovered vertices plus `lambda` times the
//! expected seed-set size. Products are evaluated as `exp(sum ln(1 - p))`
//! with `p` clamped to `[CLAMP_EPS, 1 - CLAMP_EPS]` inside the logarithm.

use crate::solvers::CoverageIndex;

pub const CLAMP_EPS: f64 = 1e-7;

#[inline]
fn clamp(p: f64) -> f64 {
    p.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS)
}

/// `coverers.coverage(u)` must list every `v` with `u` in the d-coverage of
/// `v`, i.e. an index built on the reversed graph.
pub fn loss(p: &[f64], coverers: &CoverageIndex, lambda: f64) -> f64 {
    assert_eq!(p.len(), coverers.n());
    let log_miss: Vec<f64> = p.iter().map(|&x| (1.0 - clamp(x)).ln()).collect();
    let uncovered: f64 = (0..p.len())
        .map(|u| {
            let s: f64 = coverers.coverage(u).iter().map(|&v| log_miss[v as usize]).sum();
            s.exp()
        })
        .sum();
    uncovered + lambda * p.iter().sum::<f64>()
}

/// Loss value and its gradient with respect to `p`. The clamp has zero
/// derivative outside its range.
pub fn loss_gradient(p: &[f64], coverers: &CoverageIndex, lambda: f64) -> (f64, Vec<f64>) {
    assert_eq!(p.len(), coverers.n());
    let n = p.len();
    let clamped: Vec<f64> = p.iter().map(|&x| clamp(x)).collect();
    let log_miss: Vec<f64> = clamped.iter().map(|&x| (1.0 - x).ln()).collect();
    // acc_v = sum over u covered by v of prod_u
    let mut acc = vec![0.0; n];
    let mut uncovered = 0.0;
    for u in 0..n {
        let cov = coverers.coverage(u);
        let prod = cov.iter().map(|&v| log_miss[v as usize]).sum::<f64>().exp();
        uncovered += prod;
        for &v in cov {
            acc[v as usize] += prod;
        }
    }
    let grad = (0..n)
        .map(|v| {
            let inside = p[v] > CLAMP_EPS && p[v] < 1.0 - CLAMP_EPS;
            let cover_term = if inside { -acc[v] / (1.0 - clamped[v]) } else { 0.0 };
            cover_term + lambda
        })
        .collect();
    (uncovered + lambda * p.iter().sum::<f64>(), grad)
}
