//! Evaluates every implicit-reward measure on a small model pair and lists the winners.
//!
//! cargo run --example implicit_reward_measures

use valuebias::measures::{compute_measure, top_bottom, MeasureConfig, MeasureKind};
use valuebias::scoretable::ProbTable;

fn main() -> valuebias::Result<()> {
    // A long tail of near-zero tokens is where plain log-ratios go wrong.
    let base = [0.40, 0.30, 0.20, 0.0999, 1e-9, 1e-11];
    let tuned = [0.25, 0.45, 0.20, 0.0999, 1e-6, 1e-9];
    let p = ProbTable::from_probs("base", "positive-111", &base);
    let q = ProbTable::from_probs("tuned", "positive-111", &tuned);

    for kind in MeasureKind::ALL {
        let result = compute_measure(&p, &q, MeasureConfig::new(kind))?;
        let (top, bottom) = top_bottom(&result, 2)?;
        let fmt = |list: &[valuebias::measures::RankedToken]| {
            list.iter().map(|t| format!("{}={:+.4}", t.token, t.value)).collect::<Vec<_>>().join(" ")
        };
        println!("{kind:>5}  top {:<28} bottom {}", fmt(&top), fmt(&bottom));
    }
    Ok(())
}
