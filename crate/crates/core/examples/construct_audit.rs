//! Median construct ranks for two synthetic reward models across the positive prompts.
//!
//! cargo run --example construct_audit

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use valuebias::analysis::{construct_contrasts, construct_summaries, topk_profile, AuditScope};
use valuebias::corpus::{parse_dictionary, unroll, CompletionList};
use valuebias::prompts::{generate_prompts, ValenceFilter};
use valuebias::scoretable::{ScoreKind, ScoreTable};
use valuebias::vocab::VariantForms;

fn main() -> valuebias::Result<()> {
    let dic = "freedom agency noun\nsuccess agency noun\nskill agency noun\npower agency noun\n\
               love communion noun\nfamily communion noun\nfriendship communion noun\npeace communion noun\n";
    let lexicon = unroll("big2", &parse_dictionary(dic)?, &CompletionList::default())?;
    let prompts = generate_prompts(ValenceFilter::Positive);
    let words: Vec<&str> = lexicon.entries.keys().map(String::as_str).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut tables = Vec::new();
    for (model, favored) in [("llama-rm", "agency"), ("gemma-rm", "communion")] {
        for prompt in &prompts {
            let mut t = ScoreTable::new(model, "shared", &prompt.id, ScoreKind::Reward);
            for (i, word) in words.iter().enumerate() {
                let lift = if lexicon.construct_of(word).contains(favored) { 1.0 } else { 0.0 };
                t.insert(i as u32, format!(" {word}"), rng.random_range(0.0..1.5) + lift)?;
            }
            for j in 0..20 {
                t.insert(100 + j, format!("filler{j}"), rng.random_range(-1.0..1.0))?;
            }
            tables.push(t);
        }
    }

    let report = construct_summaries(&tables, &lexicon, &prompts, &AuditScope::Full, VariantForms::default())?;
    println!("{} summaries, {} warnings", report.summaries.len(), report.warnings.len());
    for c in construct_contrasts(&report.summaries, 10_000, 1)? {
        println!(
            "{:<9} {} {:.1} vs {} {:.1}: p = {:.4} (Bonferroni {:.4}), d = {:.2}",
            c.construct,
            c.model_a,
            c.median_a,
            c.model_b,
            c.median_b,
            c.permutation.p_value,
            c.p_bonferroni,
            c.permutation.effect_size.unwrap_or(f64::NAN)
        );
    }
    for entry in topk_profile(&tables[0], std::slice::from_ref(&lexicon), 5, None)? {
        println!("top-5 of {}: {} x{} mean rank {:?}", tables[0].model_id, entry.construct, entry.count, entry.mean_rank);
    }
    Ok(())
}
