//! Rank statistics and the hypothesis-test battery used by the audits.

mod adjust;
mod kendall;
mod parametric;
mod permutation;
mod rank;

pub use adjust::{adjust, Adjustment};
pub use kendall::kendall_tau_b;
pub use parametric::{cohens_d, welch_t};
pub use permutation::{
    binomial_capped, perm_interaction, perm_t_test, Combinations, EXHAUSTIVE_LIMIT, DEFAULT_PERMUTATIONS,
};
pub use rank::{median, median_construct_rank, construct_word_ranks, ranks, RankScope, RankTable, WordIds};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    PermT,
    WelchT,
    PermInteraction,
}

/// How the null distribution of a permutation test was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Permutations {
    /// Every label assignment enumerated; holds their number.
    Exhaustive(u64),
    /// Seeded random relabelings; holds their number.
    MonteCarlo(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Correction {
    None,
    Bonferroni { m: usize },
    BhFdr,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatResult {
    pub test: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    pub effect_size: Option<f64>,
    /// Degrees of freedom (Welch only).
    pub df: Option<f64>,
    pub permutations: Option<Permutations>,
    pub seed: Option<u64>,
    pub correction: Correction,
    /// All observations identical; p is 1 by convention.
    pub degenerate: bool,
}

impl StatResult {
    pub fn is_exhaustive(&self) -> bool {
        matches!(self.permutations, Some(Permutations::Exhaustive(_)))
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub(crate) fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub(crate) fn check_finite(xs: &[f64], what: &str) -> crate::Result<()> {
    if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
        return Err(crate::Error::Value(format!("{what} contains non-finite value {x}")));
    }
    Ok(())
}
