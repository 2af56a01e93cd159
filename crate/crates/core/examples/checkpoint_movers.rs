//! Rank movers between an early and a late checkpoint, and the Kendall trajectory.
//!
//! cargo run --example checkpoint_movers

use std::collections::BTreeSet;

use valuebias::analysis::{checkpoint_trajectory, rank_change};
use valuebias::scoretable::{ScoreKind, ScoreTable};

fn main() -> valuebias::Result<()> {
    let tokens = [" Love", " Freedom", " Success", " Family", " Peace", " Power", " Kindness", " Skill"];
    let steps: [(u32, [f64; 8]); 4] = [
        (1000, [0.9, 0.2, 0.1, 0.8, 0.5, 0.0, 0.7, 0.3]),
        (4000, [0.9, 0.4, 0.3, 0.7, 0.5, 0.1, 0.6, 0.2]),
        (7000, [0.8, 0.6, 0.5, 0.6, 0.4, 0.2, 0.3, 0.1]),
        (9578, [0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1]),
    ];
    let tables: Vec<ScoreTable> = steps
        .iter()
        .map(|(step, scores)| {
            let mut t = ScoreTable::new(format!("rm-step{step}"), "tok", "positive-211", ScoreKind::Reward);
            for (i, (tok, s)) in tokens.iter().zip(scores).enumerate() {
                t.insert(i as u32, *tok, *s).expect("finite scores");
            }
            t
        })
        .collect();
    let subset: BTreeSet<u32> = (0..tokens.len() as u32).collect();

    let report = rank_change(&tables[0], &tables[3], &subset, 3)?;
    for m in &report.risers {
        println!("riser  {:<10} {} -> {} ({:+})", m.token, m.early_rank, m.late_rank, m.delta);
    }
    for m in &report.fallers {
        println!("faller {:<10} {} -> {} ({:+})", m.token, m.early_rank, m.late_rank, m.delta);
    }
    for (t, tau) in tables.iter().zip(checkpoint_trajectory(&tables, &subset)?) {
        println!("{}: tau-b vs final {tau:.3}", t.model_id);
    }
    Ok(())
}
