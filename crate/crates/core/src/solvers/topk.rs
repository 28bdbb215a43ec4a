use std::cmp::Ordering;

/// Indices of the `k` highest scores, best first; equal scores go to the
/// smaller index. `k` is clamped to the vector length. Runs in
/// `O(n + k log k)`.
pub fn top_k_by_score(scores: &[f64], k: usize) -> Vec<usize> {
    let k = k.min(scores.len());
    let rank = |a: &usize, b: &usize| -> Ordering {
        scores[*b].total_cmp(&scores[*a]).then(a.cmp(b))
    };
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    if k == 0 {
        return Vec::new();
    }
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, rank);
        idx.truncate(k);
    }
    idx.sort_unstable_by(rank);
    idx
}
