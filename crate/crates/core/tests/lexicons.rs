//! The dictionaries shipped in `data/`.

mod common;

use std::collections::BTreeSet;

use common::data;
use valuebias::corpus::{self, CompletionList, Lexicon};
use valuebias::vocab::{intersect, TokenTable, VariantForms};

/// Unrolled size of the shipped Big Two list.
const BIG2_WORDS: usize = 146;
/// Noun-tagged words among them.
const BIG2_NOUNS: usize = 85;

fn big2() -> Lexicon {
    let dic = std::fs::read_to_string(data("big2.dic")).unwrap();
    let completions = std::fs::read_to_string(data("big2.completions")).unwrap();
    corpus::unroll(
        "big2",
        &corpus::parse_dictionary(&dic).unwrap(),
        &CompletionList::parse(&completions).unwrap(),
    )
    .unwrap()
}

/// Entry lines of a data file with comments and blanks removed.
fn entry_lines(name: &str) -> Vec<String> {
    std::fs::read_to_string(data(name))
        .unwrap()
        .lines()
        .map(|l| l.split('#').next().unwrap().trim().to_string())
        .filter(|l| !l.is_empty())
        .collect()
}

#[test]
fn big2_counts_match_the_files() {
    // Count straight from the text: plain dictionary words plus one word per completion line.
    let dic = entry_lines("big2.dic");
    let completions = entry_lines("big2.completions");
    let plain: Vec<&String> = dic.iter().filter(|l| !l.split_whitespace().next().unwrap().ends_with('*')).collect();
    let mut words: BTreeSet<&str> = plain.iter().map(|l| l.split_whitespace().next().unwrap()).collect();
    words.extend(completions.iter().map(|l| l.split_whitespace().nth(1).unwrap()));
    let nouns = plain
        .iter()
        .map(|l| l.as_str())
        .chain(completions.iter().map(String::as_str))
        .filter(|l| l.split_whitespace().last() == Some("noun"))
        .count();
    assert_eq!(words.len(), BIG2_WORDS);
    assert_eq!(nouns, BIG2_NOUNS);

    let lexicon = big2();
    assert_eq!(lexicon.len(), BIG2_WORDS);
    let noun_lexicon = lexicon.filter_pos("noun");
    assert_eq!(noun_lexicon.len(), BIG2_NOUNS);
    assert_eq!(noun_lexicon.filter_pos("noun"), noun_lexicon);
    assert!(lexicon.filter_pos("interjection").is_empty());
}

#[test]
fn big2_constructs_and_examples() {
    let lexicon = big2();
    assert_eq!(lexicon.constructs, ["agency", "communion"]);
    assert_eq!(lexicon.construct_of("love"), BTreeSet::from(["communion".to_string()]));
    assert_eq!(lexicon.construct_of("Success"), BTreeSet::from(["agency".to_string()]));
    assert!(lexicon.construct_of("xylophone").is_empty());
    for word in ["achieve", "achiever", "achievement", "winner"] {
        assert_eq!(lexicon.construct_of(word), BTreeSet::from(["agency".to_string()]), "{word}");
    }
    assert!(lexicon.construct_of("winter").is_empty());
    assert!(lexicon.construct_of("wing").is_empty());
}

#[test]
fn every_completion_extends_its_stem() {
    let fragments = corpus::parse_dictionary(&std::fs::read_to_string(data("big2.dic")).unwrap()).unwrap();
    let completions = CompletionList::parse(&std::fs::read_to_string(data("big2.completions")).unwrap()).unwrap();
    let lexicon = big2();
    for f in fragments.iter().filter(|f| f.wildcard) {
        for c in completions.get(&f.stem).unwrap() {
            assert!(c.word.starts_with(&f.stem));
            assert!(lexicon.construct_of(&c.word).contains(&f.construct));
        }
    }
}

#[test]
fn unroll_is_byte_stable_and_round_trips() {
    let a = big2().to_json();
    assert_eq!(a, big2().to_json());
    assert_eq!(Lexicon::from_json(&a).unwrap().to_json(), a);
    let dic = std::fs::read_to_string(data("big2.dic")).unwrap();
    let fragments = corpus::parse_dictionary(&dic).unwrap();
    assert_eq!(corpus::parse_dictionary(&corpus::write_dictionary(&fragments)).unwrap(), fragments);
}

#[test]
fn mfd2_sample_has_virtue_and_vice_constructs() {
    let dic = std::fs::read_to_string(data("mfd2.dic")).unwrap();
    let lexicon = corpus::unroll("mfd2", &corpus::parse_dictionary(&dic).unwrap(), &CompletionList::default()).unwrap();
    let virtues: Vec<&str> = lexicon
        .constructs
        .iter()
        .map(String::as_str)
        .filter(|c| !c.ends_with(corpus::VICE_SUFFIX))
        .collect();
    assert_eq!(virtues, corpus::MFD2_VIRTUE_CONSTRUCTS);
    assert_eq!(lexicon.words_of("authority").count(), 10);
    assert_eq!(lexicon.construct_of("harm"), BTreeSet::from(["care.vice".to_string()]));
}

#[test]
fn intersection_membership_is_symmetric() {
    let lexicon = big2().filter_pos("noun");
    let a = TokenTable::from_entries("a", [(0, " love"), (1, "Freedom"), (2, "success"), (3, "xyz")]).unwrap();
    let b = TokenTable::from_entries("b", [(0, "love"), (1, " freedom"), (2, "LOVE"), (3, " friendship")]).unwrap();
    let words = |m: Vec<valuebias::vocab::WordMatch>| m.into_iter().map(|w| w.word).collect::<Vec<_>>();
    let ab = words(intersect(&a, &b, &lexicon, VariantForms::default()));
    let ba = words(intersect(&b, &a, &lexicon, VariantForms::default()));
    assert_eq!(ab, ["freedom", "love"]);
    assert_eq!(ab, ba);
    let same = intersect(&a, &a, &lexicon, VariantForms::default());
    assert!(same.iter().all(|m| m.in_a == m.in_b));
    assert_eq!(same.len(), 3);
}
