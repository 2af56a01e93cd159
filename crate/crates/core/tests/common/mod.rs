//! Independent reference implementations and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::Rng;
use valuebias::measures::MeasureKind;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// Runs the `valuebias` binary.
pub fn valuebias<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_valuebias"))
        .args(args)
        .env_clear()
        .output()
        .expect("binary runs")
}

/// Per-token implicit reward written straight from the definitions.
pub fn measure_oracle(kind: MeasureKind, p: f64, q: f64) -> f64 {
    let lp = p.ln();
    let lq = q.ln();
    match kind {
        MeasureKind::Llr => lq - lp,
        MeasureKind::Lr20 => lq.max(-20.0) - lp.max(-20.0),
        MeasureKind::Lr10 => lq.max(-10.0) - lp.max(-10.0),
        MeasureKind::P1lr => p * (lq - lp),
        MeasureKind::P2lr => q * (lq - lp),
        MeasureKind::Mwlr => (p + q) / 2.0 * (lq - lp),
        MeasureKind::Gmlr => (p * q).sqrt() * (lq - lp),
        MeasureKind::Jslr => {
            let m = (p + q) / 2.0;
            (q * (q / m).ln() - p * (p / m).ln()) / 2.0
        }
    }
}

/// Mid-ranks by counting: 1 + #strictly higher + half the other ties.
pub fn midrank_oracle(scores: &[f64]) -> Vec<f64> {
    scores
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let higher = scores.iter().filter(|o| *o > s).count();
            let ties = scores.iter().enumerate().filter(|(j, o)| *j != i && *o == s).count();
            1.0 + higher as f64 + ties as f64 / 2.0
        })
        .collect()
}

/// τ-b by enumerating all pairs.
pub fn kendall_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut concordant, mut discordant, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 {
                tx += 1;
            }
            if dy == 0.0 {
                ty += 1;
            }
            if dx * dy > 0.0 {
                concordant += 1;
            } else if dx * dy < 0.0 {
                discordant += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    (concordant - discordant) as f64 / ((n0 - tx) as f64 * (n0 - ty) as f64).sqrt()
}

/// Two-sided exhaustive permutation p-value by recursive relabeling.
///
/// Every way of drawing `a.len()` of the pooled observations into group a is
/// visited; a relabeling counts when its |mean difference| reaches the
/// observed one, up to the `1e-9 · max|x|` slack used for float ties.
pub fn perm_oracle(a: &[f64], b: &[f64]) -> (f64, u64) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let scale = pooled.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let observed = (mean(a) - mean(b)).abs() - 1e-9 * scale;

    struct Walk<'a> {
        pooled: &'a [f64],
        na: usize,
        nb: usize,
        observed: f64,
        hits: u64,
        total: u64,
    }
    fn visit(w: &mut Walk, i: usize, in_a: usize, sum_a: f64, sum_b: f64) {
        let in_b = i - in_a;
        if in_a > w.na || in_b > w.nb {
            return;
        }
        if i == w.pooled.len() {
            w.total += 1;
            if (sum_a / w.na as f64 - sum_b / w.nb as f64).abs() >= w.observed {
                w.hits += 1;
            }
            return;
        }
        let x = w.pooled[i];
        visit(w, i + 1, in_a + 1, sum_a + x, sum_b);
        visit(w, i + 1, in_a, sum_a, sum_b + x);
    }
    let mut walk = Walk {
        pooled: &pooled,
        na: a.len(),
        nb: b.len(),
        observed,
        hits: 0,
        total: 0,
    };
    visit(&mut walk, 0, 0, 0.0, 0.0);
    (walk.hits as f64 / walk.total as f64, walk.total)
}

/// Benjamini–Hochberg by its definition: the minimum over j ≥ rank(i) of m·p₍ⱼ₎/j.
pub fn bh_oracle(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut sorted: Vec<f64> = p.to_vec();
    sorted.sort_by(f64::total_cmp);
    p.iter()
        .map(|pi| {
            let first = sorted.iter().position(|s| s == pi).unwrap();
            (first..m)
                .map(|j| sorted[j] * m as f64 / (j + 1) as f64)
                .fold(f64::INFINITY, f64::min)
                .min(1.0)
        })
        .collect()
}

/// A random probability vector with a long low-probability tail.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let weights: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            // Spread over ~12 orders of magnitude.
            10f64.powf(-12.0 * u * u)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| w / total).collect()
}
