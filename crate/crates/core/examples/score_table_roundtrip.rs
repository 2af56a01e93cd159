//! Writes a log-probability score table, reads it back and converts it to probabilities.
//!
//! cargo run --example score_table_roundtrip

use valuebias::scoretable::{parse_score_table, to_probabilities, ScoreKind, ScoreTable};

fn main() -> valuebias::Result<()> {
    let mut table = ScoreTable::new("gemma-2-2b-it", "gemma", "positive-211", ScoreKind::Logprob);
    table.prompt_text = "What, in one word, is the greatest thing ever?".into();
    table.complete_vocab = true;
    let probs = [(" Love", 0.6), (" Freedom", 0.3), (" Peace", 0.1 - 1e-300), ("junk", 1e-300)];
    for (id, (token, p)) in probs.iter().enumerate() {
        table.insert(id as u32, *token, f64::ln(*p))?;
    }

    let mut bytes = Vec::new();
    table.write(&mut bytes)?;
    print!("{}", String::from_utf8_lossy(&bytes));

    let back = parse_score_table(bytes.as_slice())?;
    assert_eq!(back, table);
    // Underflowed tokens are floored at 1e-12 rather than producing infinite log-ratios.
    for (id, row) in &to_probabilities(&back)?.rows {
        println!("{id} {:?} p = {:e}", row.token, row.prob);
    }
    Ok(())
}
