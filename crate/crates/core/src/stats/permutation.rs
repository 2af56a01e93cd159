//! Two-sample and 2×2 interaction permutation tests.
//!
//! When the number of distinct relabelings is at most [`EXHAUSTIVE_LIMIT`]
//! every relabeling is enumerated and `p = #{|t*| ≥ |t|} / total`. Otherwise
//! seeded Monte Carlo relabelings give `p = (#{|t*| ≥ |t|} + 1) / (n + 1)`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_finite, mean, Correction, Permutations, StatResult, TestKind};
use crate::error::{Error, Result};

pub const EXHAUSTIVE_LIMIT: u64 = 20_000;
pub const DEFAULT_PERMUTATIONS: u64 = 10_000;

/// `C(n, k)`, or `None` once it exceeds `cap`.
pub fn binomial_capped(n: usize, k: usize, cap: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // Exact at every step: acc · (n − i) is divisible by (i + 1).
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Lexicographic k-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    started: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            started: false,
        }
    }

    /// Advances to the next subset; `None` when exhausted.
    pub fn next_subset(&mut self) -> Option<&[usize]> {
        let k = self.idx.len();
        if k > self.n {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.idx);
        }
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                break;
            }
        }
        self.idx[i] += 1;
        for j in i + 1..k {
            self.idx[j] = self.idx[j - 1] + 1;
        }
        Some(&self.idx)
    }
}

/// Slack for `|t*| ≥ |t|` comparisons, absorbing summation-order rounding.
fn tolerance(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    1e-9 * scale
}

fn is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

/// Difference-in-means of the `a` positions versus the rest, from a running sum.
fn split_difference(selected_sum: f64, total: f64, na: usize, nb: usize) -> f64 {
    selected_sum / na as f64 - (total - selected_sum) / nb as f64
}

/// Two-sided permutation test on `mean(a) − mean(b)`.
pub fn perm_t_test(a: &[f64], b: &[f64], n_perm: u64, seed: u64) -> Result<StatResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Argument("permutation t-test needs at least two samples per group".into()));
    }
    check_finite(a, "group a")?;
    check_finite(b, "group b")?;
    let statistic = mean(a) - mean(b);
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (na, nb) = (a.len(), b.len());
    let total: f64 = pooled.iter().sum();
    let observed = statistic.abs() - tolerance(&pooled);
    let degenerate = is_constant(&pooled);

    let (p_value, permutations) = match binomial_capped(na + nb, na, EXHAUSTIVE_LIMIT) {
        Some(count) => {
            // C(n, na) = C(n, nb): enumerate whichever group is smaller.
            let k = na.min(nb);
            let mut hits = 0u64;
            let mut combos = Combinations::new(na + nb, k);
            while let Some(subset) = combos.next_subset() {
                let sum: f64 = subset.iter().map(|i| pooled[*i]).sum();
                if split_difference(sum, total, k, na + nb - k).abs() >= observed {
                    hits += 1;
                }
            }
            (hits as f64 / count as f64, Permutations::Exhaustive(count))
        }
        None => {
            if n_perm == 0 {
                return Err(Error::Argument("n_perm must be at least 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut shuffled = pooled.clone();
            let mut hits = 0u64;
            for _ in 0..n_perm {
                let (chosen, _) = shuffled.partial_shuffle(&mut rng, na);
                let sum: f64 = chosen.iter().sum();
                if split_difference(sum, total, na, nb).abs() >= observed {
                    hits += 1;
                }
            }
            ((hits + 1) as f64 / (n_perm + 1) as f64, Permutations::MonteCarlo(n_perm))
        }
    };
    Ok(StatResult {
        test: TestKind::PermT,
        statistic,
        p_value: if degenerate { 1.0 } else { p_value.min(1.0) },
        effect_size: super::cohens_d(a, b).ok(),
        df: None,
        permutations: Some(permutations),
        seed: Some(seed),
        correction: Correction::None,
        degenerate,
    })
}

/// Within-stratum model differences `mean(first) − mean(second)` for every relabeling.
fn stratum_differences(first: &[f64], second: &[f64]) -> Vec<f64> {
    let pooled: Vec<f64> = first.iter().chain(second).copied().collect();
    let total: f64 = pooled.iter().sum();
    let mut out = Vec::new();
    let mut combos = Combinations::new(pooled.len(), first.len());
    while let Some(subset) = combos.next_subset() {
        let sum: f64 = subset.iter().map(|i| pooled[*i]).sum();
        out.push(split_difference(sum, total, first.len(), second.len()));
    }
    out
}

/// Difference-of-differences test for a 2×2 design.
///
/// `cells` is `[c11, c12, c21, c22]`: the first index is the stratum
/// (category), the second the factor whose labels are permuted within each
/// stratum. The statistic is `(m11 − m12) − (m21 − m22)`.
pub fn perm_interaction(cells: [&[f64]; 4], n_perm: u64, seed: u64) -> Result<StatResult> {
    if cells.iter().any(|c| c.is_empty()) {
        return Err(Error::Domain("every cell of the 2×2 design needs at least one sample".into()));
    }
    for c in cells {
        check_finite(c, "cell")?;
    }
    let [c11, c12, c21, c22] = cells;
    let statistic = (mean(c11) - mean(c12)) - (mean(c21) - mean(c22));
    let all: Vec<f64> = cells.iter().flat_map(|c| c.iter().copied()).collect();
    let observed = statistic.abs() - tolerance(&all);
    let degenerate = is_constant(&all);

    let count1 = binomial_capped(c11.len() + c12.len(), c11.len(), EXHAUSTIVE_LIMIT);
    let count2 = binomial_capped(c21.len() + c22.len(), c21.len(), EXHAUSTIVE_LIMIT);
    let exhaustive = match (count1, count2) {
        (Some(x), Some(y)) => x.checked_mul(y).filter(|t| *t <= EXHAUSTIVE_LIMIT),
        _ => None,
    };

    let (p_value, permutations) = match exhaustive {
        Some(count) => {
            let first = stratum_differences(c11, c12);
            let second = stratum_differences(c21, c22);
            let hits = first
                .iter()
                .map(|d1| second.iter().filter(|d2| (d1 - *d2).abs() >= observed).count() as u64)
                .sum::<u64>();
            (hits as f64 / count as f64, Permutations::Exhaustive(count))
        }
        None => {
            if n_perm == 0 {
                return Err(Error::Argument("n_perm must be at least 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s1: Vec<f64> = c11.iter().chain(c12).copied().collect();
            let mut s2: Vec<f64> = c21.iter().chain(c22).copied().collect();
            let (t1, t2): (f64, f64) = (s1.iter().sum(), s2.iter().sum());
            let mut hits = 0u64;
            for _ in 0..n_perm {
                let (x, _) = s1.partial_shuffle(&mut rng, c11.len());
                let d1 = split_difference(x.iter().sum(), t1, c11.len(), c12.len());
                let (y, _) = s2.partial_shuffle(&mut rng, c21.len());
                let d2 = split_difference(y.iter().sum(), t2, c21.len(), c22.len());
                if (d1 - d2).abs() >= observed {
                    hits += 1;
                }
            }
            ((hits + 1) as f64 / (n_perm + 1) as f64, Permutations::MonteCarlo(n_perm))
        }
    };
    Ok(StatResult {
        test: TestKind::PermInteraction,
        statistic,
        p_value: if degenerate { 1.0 } else { p_value.min(1.0) },
        effect_size: None,
        df: None,
        permutations: Some(permutations),
        seed: Some(seed),
        correction: Correction::None,
        degenerate,
    })
}
