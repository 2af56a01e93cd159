//! Psycholinguistic dictionaries: parsing, wildcard unrolling and
//! word-to-construct lookup.
//!
//! A dictionary file holds one entry per line, `<stem>[*] <construct> [<pos>]`,
//! with `#` starting a comment. A trailing `*` marks a wildcard fragment
//! (`achiev*`) which is expanded only through an explicit completion list,
//! never by automatic morphology.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constructs of the Big Two dictionary.
pub const BIG_TWO_CONSTRUCTS: [&str; 2] = ["agency", "communion"];

/// Virtue constructs of the Moral Foundations Dictionary 2.
pub const MFD2_VIRTUE_CONSTRUCTS: [&str; 5] = ["authority", "care", "fairness", "loyalty", "sanctity"];

/// Suffix that marks an MFD2 vice construct (`care.vice`).
pub const VICE_SUFFIX: &str = ".vice";

/// One dictionary entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    /// Lowercase stem without the trailing asterisk.
    pub stem: String,
    pub wildcard: bool,
    pub construct: String,
    pub pos: Option<String>,
}

impl Fragment {
    /// Renders the fragment as a dictionary line.
    pub fn to_line(&self) -> String {
        let mut line = self.stem.clone();
        if self.wildcard {
            line.push('*');
        }
        line.push(' ');
        line.push_str(&self.construct);
        if let Some(pos) = &self.pos {
            line.push(' ');
            line.push_str(pos);
        }
        line
    }
}

/// Strips a trailing comment and surrounding whitespace.
fn content(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

/// Splits a `stem[*]` token into a validated lowercase stem and wildcard flag.
fn parse_stem(token: &str, line: usize) -> Result<(String, bool)> {
    let lower = token.to_lowercase();
    let (stem, wildcard) = match lower.strip_suffix('*') {
        Some(s) => (s.to_string(), true),
        None => (lower, false),
    };
    if stem.is_empty() {
        return Err(Error::parse(line, "empty stem"));
    }
    if stem.contains('*') {
        return Err(Error::parse(line, format!("stem `{stem}` contains an interior `*`")));
    }
    Ok((stem, wildcard))
}

/// Parses dictionary text into fragments, one per entry line.
pub fn parse_dictionary(text: &str) -> Result<Vec<Fragment>> {
    let mut fragments = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = content(raw);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.len() {
            1 => return Err(Error::parse(line_no, "missing construct label")),
            2 | 3 => {}
            n => {
                return Err(Error::parse(
                    line_no,
                    format!("expected `<stem>[*] <construct> [<pos>]`, found {n} fields"),
                ))
            }
        }
        let (stem, wildcard) = parse_stem(fields[0], line_no)?;
        fragments.push(Fragment {
            stem,
            wildcard,
            construct: fields[1].to_lowercase(),
            pos: fields.get(2).map(|p| p.to_lowercase()),
        });
    }
    Ok(fragments)
}

/// Renders fragments back into dictionary text.
pub fn write_dictionary(fragments: &[Fragment]) -> String {
    let mut out = String::new();
    for f in fragments {
        let _ = writeln!(out, "{}", f.to_line());
    }
    out
}

/// A curated full word for a wildcard stem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub word: String,
    /// Overrides the fragment's tag when present.
    pub pos: Option<String>,
}

/// Curated completions keyed by fragment stem.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompletionList {
    pub completions: BTreeMap<String, Vec<Completion>>,
}

impl CompletionList {
    /// Parses a completion file: one completion per line, `<stem>[*] <word> [<pos>]`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut list = CompletionList::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = content(raw);
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(Error::parse(line_no, "expected `<stem>[*] <word> [<pos>]`"));
            }
            let (stem, _) = parse_stem(fields[0], line_no)?;
            list.insert(
                &stem,
                Completion {
                    word: fields[1].to_lowercase(),
                    pos: fields.get(2).map(|p| p.to_lowercase()),
                },
            );
        }
        Ok(list)
    }

    pub fn insert(&mut self, stem: &str, completion: Completion) {
        self.completions.entry(stem.to_string()).or_default().push(completion);
    }

    pub fn get(&self, stem: &str) -> Option<&[Completion]> {
        self.completions.get(stem).map(Vec::as_slice)
    }
}

/// A (construct, part-of-speech) coding attached to a word.
pub type Coding = (String, Option<String>);

/// An unrolled dictionary: words mapped to the constructs they code for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub name: String,
    /// Sorted, unique.
    pub constructs: Vec<String>,
    pub entries: BTreeMap<String, BTreeSet<Coding>>,
}

#[derive(Serialize, Deserialize)]
struct LexiconDoc {
    name: String,
    constructs: Vec<String>,
    entries: Vec<EntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    word: String,
    construct: String,
    pos: Option<String>,
}

impl Lexicon {
    pub fn new(name: impl Into<String>) -> Self {
        Lexicon {
            name: name.into(),
            constructs: Vec::new(),
            entries: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds a coding for `word` and registers its construct.
    pub fn insert(&mut self, word: &str, construct: &str, pos: Option<&str>) {
        self.entries
            .entry(word.to_lowercase())
            .or_default()
            .insert((construct.to_string(), pos.map(str::to_string)));
        if let Err(i) = self.constructs.binary_search_by(|c| c.as_str().cmp(construct)) {
            self.constructs.insert(i, construct.to_string());
        }
    }

    /// All constructs coded for `word`; empty when the word is absent.
    pub fn construct_of(&self, word: &str) -> BTreeSet<String> {
        self.entries
            .get(&word.to_lowercase())
            .map(|codings| codings.iter().map(|(c, _)| c.clone()).collect())
            .unwrap_or_default()
    }

    /// Words coded for `construct`, in lexical order.
    pub fn words_of<'a>(&'a self, construct: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.entries
            .iter()
            .filter(move |(_, codings)| codings.iter().any(|(c, _)| c == construct))
            .map(|(w, _)| w.as_str())
    }

    /// Keeps only codings carrying the `pos` tag. The declared construct list is kept.
    pub fn filter_pos(&self, pos: &str) -> Lexicon {
        let pos = pos.to_lowercase();
        let entries = self
            .entries
            .iter()
            .filter_map(|(word, codings)| {
                let kept: BTreeSet<Coding> = codings
                    .iter()
                    .filter(|(_, p)| p.as_deref() == Some(pos.as_str()))
                    .cloned()
                    .collect();
                (!kept.is_empty()).then(|| (word.clone(), kept))
            })
            .collect();
        Lexicon {
            name: self.name.clone(),
            constructs: self.constructs.clone(),
            entries,
        }
    }

    /// Checks the construct sets of the known dictionaries.
    pub fn validate(&self) -> Result<()> {
        let allowed: &[&str] = match self.name.as_str() {
            "big2" => &BIG_TWO_CONSTRUCTS,
            "mfd2" => &MFD2_VIRTUE_CONSTRUCTS,
            _ => return Ok(()),
        };
        for c in &self.constructs {
            let base = c.strip_suffix(VICE_SUFFIX).unwrap_or(c);
            let vice_ok = self.name == "mfd2" && c.ends_with(VICE_SUFFIX);
            if !allowed.contains(&base) || (base != c && !vice_ok) {
                return Err(Error::Format(format!(
                    "construct `{c}` is not part of the {} dictionary",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let doc = LexiconDoc {
            name: self.name.clone(),
            constructs: self.constructs.clone(),
            entries: self
                .entries
                .iter()
                .flat_map(|(word, codings)| {
                    codings.iter().map(move |(construct, pos)| EntryDoc {
                        word: word.clone(),
                        construct: construct.clone(),
                        pos: pos.clone(),
                    })
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("lexicon serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: LexiconDoc = serde_json::from_str(text)
            .map_err(|e| Error::parse(e.line(), format!("lexicon document: {e}")))?;
        let mut lexicon = Lexicon::new(doc.name);
        for c in doc.constructs {
            if lexicon.constructs.contains(&c) {
                return Err(Error::Format(format!("duplicate construct `{c}`")));
            }
            lexicon.constructs.push(c);
        }
        lexicon.constructs.sort();
        for e in doc.entries {
            if !lexicon.constructs.contains(&e.construct) {
                return Err(Error::Format(format!(
                    "entry `{}` uses undeclared construct `{}`",
                    e.word, e.construct
                )));
            }
            lexicon.insert(&e.word, &e.construct, e.pos.as_deref());
        }
        lexicon.validate()?;
        Ok(lexicon)
    }
}

/// Expands fragments into a lexicon using curated completions for wildcards.
pub fn unroll(name: &str, fragments: &[Fragment], completions: &CompletionList) -> Result<Lexicon> {
    let mut lexicon = Lexicon::new(name);
    for f in fragments {
        if !f.wildcard {
            lexicon.insert(&f.stem, &f.construct, f.pos.as_deref());
            continue;
        }
        let list = completions
            .get(&f.stem)
            .ok_or_else(|| Error::MissingCompletion(f.stem.clone()))?;
        for c in list {
            if !c.word.starts_with(&f.stem) {
                return Err(Error::Consistency {
                    stem: f.stem.clone(),
                    word: c.word.clone(),
                });
            }
            let pos = c.pos.as_deref().or(f.pos.as_deref());
            lexicon.insert(&c.word, &f.construct, pos);
        }
    }
    lexicon.validate()?;
    Ok(lexicon)
}
