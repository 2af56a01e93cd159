//! Unrolls the shipped Big Two dictionary and prints per-construct counts.
//!
//! cargo run --example unroll_lexicon

use valuebias::corpus::{parse_dictionary, unroll, CompletionList};

fn main() -> valuebias::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let fragments = parse_dictionary(&std::fs::read_to_string(format!("{dir}/big2.dic"))?)?;
    let completions = CompletionList::parse(&std::fs::read_to_string(format!("{dir}/big2.completions"))?)?;
    let lexicon = unroll("big2", &fragments, &completions)?;
    let nouns = lexicon.filter_pos("noun");

    println!("{} fragments -> {} words ({} nouns)", fragments.len(), lexicon.len(), nouns.len());
    for construct in &lexicon.constructs {
        let words: Vec<&str> = nouns.words_of(construct).take(8).collect();
        println!("{construct:>10}: {} words, nouns include {}", lexicon.words_of(construct).count(), words.join(", "));
    }
    for word in ["achievement", "love", "winter"] {
        println!("construct_of({word}) = {:?}", lexicon.construct_of(word));
    }
    Ok(())
}
