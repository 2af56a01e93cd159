//! Boosts ten tokens of a random distribution and counts how many each measure recovers.
//!
//! cargo run --example boost_recovery

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use valuebias::analysis::{boost, measure_comparison, BoostSpec};
use valuebias::scoretable::ProbTable;

fn main() -> valuebias::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    // Zipf-like base with random jitter: a few likely tokens and a long tail.
    let weights: Vec<f64> = (1..=1000).map(|r| rng.random_range(0.5..1.5) / r as f64).collect();
    let total: f64 = weights.iter().sum();
    let base = ProbTable::from_probs("base", "positive-111", &weights.iter().map(|w| w / total).collect::<Vec<_>>());

    let targets: BTreeSet<u32> = sample(&mut rng, 1000, 10).into_iter().map(|i| i as u32).collect();
    // The tuned model also drifts away from the base on every token, which is what
    // makes tail tokens produce large spurious log-ratios.
    let mut drifted = base.clone();
    for row in drifted.rows.values_mut() {
        row.prob *= f64::exp(rng.random_range(-0.3..0.3));
    }
    let mass: f64 = drifted.rows.values().map(|r| r.prob).sum();
    drifted.rows.values_mut().for_each(|r| r.prob /= mass);

    for factor in [1.5, 3.0, 10.0] {
        let boosted = boost(&drifted, &BoostSpec::new(targets.iter().copied(), factor)?)?;
        println!("factor {factor}");
        for row in measure_comparison(&base, &boosted, &targets, 10)? {
            println!("  {:>5}: {}/{} in top {}", row.kind, row.recovered, row.targets, row.k);
        }
    }
    Ok(())
}
