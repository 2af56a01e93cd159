//! Finds lexicon words that are single tokens in two tokenizer vocabularies.
//!
//! cargo run --example vocab_intersection

use valuebias::corpus::{parse_dictionary, unroll, CompletionList};
use valuebias::vocab::{intersect, surface_variants, TokenTable, VariantForms};

fn main() -> valuebias::Result<()> {
    let lexicon = unroll(
        "big2",
        &parse_dictionary("love communion noun\nfriendship communion noun\nfreedom agency noun\nsuccess agency noun\n")?,
        &CompletionList::default(),
    )?;
    // Vocab files are `<id>\t<surface>` with `\x20` marking a leading space.
    let gemma = TokenTable::parse("gemma", b"0\t\\x20love\n1\tFreedom\n2\t\\x20success\n3\tfriend\n")?;
    let llama = TokenTable::parse("llama", b"0\tlove\n1\t\\x20freedom\n2\tLOVE\n3\t\\x20friendship\n")?;

    println!("variants of `love`: {:?}", surface_variants("love")?.variants);
    for forms in [VariantForms::default(), VariantForms { uppercase: false }] {
        println!("uppercase variants: {}", forms.uppercase);
        for m in intersect(&gemma, &llama, &lexicon, forms) {
            println!("  {:<10} gemma {:?}  llama {:?}", m.word, m.in_a, m.in_b);
        }
    }
    Ok(())
}
