//! Variant-averaged MWLR gap between "freedom" and "love" for every Gemma-to-Llama pair.
//!
//! cargo run --example gap_grid

use valuebias::measures::{pairwise_gap_grid, MeasureConfig, MeasureKind};
use valuebias::scoretable::{ProbRow, ProbTable};
use valuebias::vocab::surface_variants;

fn model(name: &str, tokenizer: &str, love: f64, freedom: f64) -> (String, ProbTable) {
    let rows = [(" love", love * 0.7), ("Love", love * 0.3), (" freedom", freedom * 0.6), (" Freedom", freedom * 0.4)];
    let mut table = ProbTable {
        model_id: name.into(),
        tokenizer_id: tokenizer.into(),
        prompt_id: "positive-111".into(),
        rows: Default::default(),
    };
    let mass: f64 = rows.iter().map(|r| r.1).sum();
    for (i, (token, p)) in rows.iter().enumerate() {
        table.rows.insert(i as u32, ProbRow { token: token.to_string(), prob: *p });
    }
    table.rows.insert(99, ProbRow { token: "rest".into(), prob: 1.0 - mass });
    (name.to_string(), table)
}

fn main() -> valuebias::Result<()> {
    let gemmas = vec![model("gemma-2b", "gemma", 0.20, 0.05), model("gemma-9b", "gemma", 0.25, 0.04)];
    let llamas = vec![
        model("llama-1b", "llama", 0.08, 0.15),
        model("llama-3b", "llama", 0.06, 0.18),
        model("llama-8b", "llama", 0.05, 0.22),
    ];
    let cells = pairwise_gap_grid(
        &gemmas,
        &llamas,
        &surface_variants("freedom")?,
        &surface_variants("love")?,
        MeasureConfig::new(MeasureKind::Mwlr),
    )?;
    for c in cells {
        println!("{:>8} -> {:<8} gap {:+.4}", c.source, c.target, c.gap.unwrap_or(f64::NAN));
    }
    Ok(())
}
