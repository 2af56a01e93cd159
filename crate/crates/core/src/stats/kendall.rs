//! Kendall's τ-b in O(n log n) (Knight's merge-sort algorithm).

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Pairs tied within runs of equal keys, Σ t(t−1)/2.
fn tied_pairs<T>(sorted: &[T], same: impl Fn(&T, &T) -> bool) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if same(&w[0], &w[1]) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Sorts `values` ascending and returns the number of strict inversions removed.
fn merge_sort_swaps(values: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_sort_swaps(&mut values[..mid], buf) + merge_sort_swaps(&mut values[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if values[j] < values[i] {
            // values[j] is strictly below every remaining left element.
            swaps += (mid - i) as u64;
            buf.push(values[j]);
            j += 1;
        } else {
            buf.push(values[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&values[i..mid]);
    buf.extend_from_slice(&values[j..n]);
    values.copy_from_slice(buf);
    swaps
}

/// τ-b = (C − D) / √((n₀ − n₁)(n₀ − n₂)) with tie corrections in both vectors.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Argument(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::Argument("Kendall's tau needs at least two observations".into()));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Value("rank vectors contain NaN".into()));
    }
    let n = x.len() as u64;
    let n0 = n * (n - 1) / 2;

    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.total_cmp(&b.1)));
    let x_ties = tied_pairs(&pairs, |a, b| a.0 == b.0);
    let joint_ties = tied_pairs(&pairs, |a, b| a.0 == b.0 && a.1 == b.1);

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = Vec::with_capacity(ys.len());
    let swaps = merge_sort_swaps(&mut ys, &mut buf);
    let y_ties = tied_pairs(&ys, |a, b| a == b);

    if x_ties == n0 || y_ties == n0 {
        return Err(Error::Undefined("a rank vector is entirely tied".into()));
    }
    let net = n0 as i64 - x_ties as i64 - y_ties as i64 + joint_ties as i64 - 2 * swaps as i64;
    Ok(net as f64 / ((n0 - x_ties) as f64 * (n0 - y_ties) as f64).sqrt())
}
