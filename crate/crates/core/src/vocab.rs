//! Tokenizer vocabularies, whitespace/capitalization surface variants and
//! cross-tokenizer word intersection.
//!
//! Vocabulary files hold one `<id>\t<surface>` entry per line. See
//! `docs/formats.md` for the escape rules.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::corpus::Lexicon;
use crate::error::{Error, Result};

/// A tokenizer vocabulary: token id to decoded surface string.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenTable {
    pub tokenizer_id: String,
    tokens: BTreeMap<u32, String>,
    by_surface: HashMap<String, u32>,
}

impl TokenTable {
    pub fn new(tokenizer_id: impl Into<String>) -> Self {
        TokenTable {
            tokenizer_id: tokenizer_id.into(),
            ..Default::default()
        }
    }

    /// Builds a table from (id, surface) pairs, rejecting duplicate ids.
    pub fn from_entries<I, S>(tokenizer_id: impl Into<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, S)>,
        S: Into<String>,
    {
        let mut table = TokenTable::new(tokenizer_id);
        for (id, surface) in entries {
            table.insert(id, surface.into())?;
        }
        Ok(table)
    }

    fn insert(&mut self, id: u32, surface: String) -> Result<()> {
        if self.tokens.contains_key(&id) {
            return Err(Error::Format(format!("duplicate token id {id}")));
        }
        // Lowest id wins when two ids decode to the same surface.
        self.by_surface
            .entry(surface.clone())
            .and_modify(|existing| *existing = (*existing).min(id))
            .or_insert(id);
        self.tokens.insert(id, surface);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn surface(&self, id: u32) -> Option<&str> {
        self.tokens.get(&id).map(String::as_str)
    }

    pub fn id_of(&self, surface: &str) -> Option<u32> {
        self.by_surface.get(surface).copied()
    }

    pub fn contains_surface(&self, surface: &str) -> bool {
        self.by_surface.contains_key(surface)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> {
        self.tokens.iter().map(|(id, s)| (*id, s.as_str()))
    }

    /// Variants of `group` that are single entries of this vocabulary, in group order.
    pub fn resolve(&self, group: &VariantGroup) -> Vec<(String, u32)> {
        group
            .variants
            .iter()
            .filter_map(|v| self.id_of(v).map(|id| (v.clone(), id)))
            .collect()
    }

    /// Parses the tab-separated vocabulary format.
    pub fn parse(tokenizer_id: impl Into<String>, bytes: &[u8]) -> Result<Self> {
        let mut table = TokenTable::new(tokenizer_id);
        for (idx, raw) in bytes.split(|b| *b == b'\n').enumerate() {
            let line_no = idx + 1;
            let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
            if raw.is_empty() {
                continue;
            }
            let line = std::str::from_utf8(raw)
                .map_err(|_| Error::parse(line_no, "line is not valid UTF-8"))?;
            let (id, surface) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(line_no, "expected `<id>\\t<surface>`"))?;
            let id: u32 = id
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid token id `{id}`")))?;
            let surface = unescape(surface).map_err(|msg| Error::parse(line_no, msg))?;
            table.insert(id, surface).map_err(|e| Error::parse(line_no, e.to_string()))?;
        }
        Ok(table)
    }

    /// Renders the table in the vocabulary file format, ordered by id.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, surface) in &self.tokens {
            let _ = writeln!(out, "{id}\t{}", escape(surface));
        }
        out
    }
}

/// Escapes a surface for the vocabulary format.
///
/// Backslash, tab, newline and carriage return use C escapes; other control
/// characters and any leading or trailing space are written as `\xHH`.
pub fn escape(surface: &str) -> String {
    let lead = surface.len() - surface.trim_start_matches(' ').len();
    let trail_start = surface.trim_end_matches(' ').len().max(lead);
    let mut out = String::with_capacity(surface.len());
    for (i, ch) in surface.char_indices() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            ' ' if i < lead || i >= trail_start => out.push_str("\\x20"),
            c if c.is_ascii_control() => {
                let _ = write!(out, "\\x{:02x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// Inverse of [`escape`]. `\xHH` denotes a raw byte; the decoded bytes must be UTF-8.
pub fn unescape(text: &str) -> std::result::Result<String, String> {
    let mut bytes = Vec::with_capacity(text.len());
    let mut rest = text.as_bytes();
    while let Some((&b, tail)) = rest.split_first() {
        rest = tail;
        if b != b'\\' {
            bytes.push(b);
            continue;
        }
        let (&code, tail) = rest.split_first().ok_or("dangling backslash")?;
        rest = tail;
        match code {
            b'\\' => bytes.push(b'\\'),
            b't' => bytes.push(b'\t'),
            b'n' => bytes.push(b'\n'),
            b'r' => bytes.push(b'\r'),
            b'x' => {
                let hex = rest.get(..2).ok_or("truncated \\x escape")?;
                let hex = std::str::from_utf8(hex).map_err(|_| "invalid \\x escape")?;
                let value = u8::from_str_radix(hex, 16).map_err(|_| format!("invalid \\x escape `{hex}`"))?;
                bytes.push(value);
                rest = &rest[2..];
            }
            other => return Err(format!("unknown escape `\\{}`", other as char)),
        }
    }
    String::from_utf8(bytes).map_err(|_| "surface is not valid UTF-8".to_string())
}

/// Strips at most one leading space, then lowercases.
pub fn canonicalize(surface: &str) -> String {
    surface.strip_prefix(' ').unwrap_or(surface).to_lowercase()
}

/// Which casings to generate; each casing appears with and without one leading space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariantForms {
    pub uppercase: bool,
}

impl Default for VariantForms {
    fn default() -> Self {
        VariantForms { uppercase: true }
    }
}

/// Surface forms of one canonical word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantGroup {
    pub canonical: String,
    /// Deduplicated, in generation order: lower, title, upper, each bare then spaced.
    pub variants: Vec<String>,
}

fn title_case(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// The six whitespace/capitalization variants of `word`.
pub fn surface_variants(word: &str) -> Result<VariantGroup> {
    surface_variants_with(word, VariantForms::default())
}

pub fn surface_variants_with(word: &str, forms: VariantForms) -> Result<VariantGroup> {
    if word.is_empty() {
        return Err(Error::Argument("word must be non-empty".into()));
    }
    if word.trim() != word {
        return Err(Error::Argument(format!("word `{word}` has surrounding whitespace")));
    }
    let canonical = word.to_lowercase();
    let mut casings = vec![canonical.clone(), title_case(&canonical)];
    if forms.uppercase {
        casings.push(canonical.to_uppercase());
    }
    let mut variants: Vec<String> = Vec::with_capacity(6);
    for casing in casings {
        for form in [casing.clone(), format!(" {casing}")] {
            if !variants.contains(&form) && canonicalize(&form) == canonical {
                variants.push(form);
            }
        }
    }
    Ok(VariantGroup { canonical, variants })
}

/// A lexicon word present as a single token in both vocabularies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordMatch {
    pub word: String,
    pub in_a: Vec<(String, u32)>,
    pub in_b: Vec<(String, u32)>,
}

/// Lexicon words with at least one single-token variant in each vocabulary.
pub fn intersect(a: &TokenTable, b: &TokenTable, words: &Lexicon, forms: VariantForms) -> Vec<WordMatch> {
    words
        .entries
        .keys()
        .filter_map(|word| {
            let group = surface_variants_with(word, forms).ok()?;
            let in_a = a.resolve(&group);
            let in_b = b.resolve(&group);
            (!in_a.is_empty() && !in_b.is_empty()).then(|| WordMatch {
                word: word.clone(),
                in_a,
                in_b,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_dictionary, unroll, CompletionList};

    fn lexicon(text: &str) -> Lexicon {
        unroll("big2", &parse_dictionary(text).unwrap(), &CompletionList::default()).unwrap()
    }

    #[test]
    fn loads_four_entries() {
        let t = TokenTable::parse("t", b"0\ta\n1\t\\x20love\n2\tb c\n3\t\\\\\n").unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.surface(1), Some(" love"));
        assert_eq!(t.surface(2), Some("b c"));
        assert_eq!(t.surface(3), Some("\\"));
    }

    #[test]
    fn duplicate_id_is_named() {
        let err = TokenTable::parse("t", b"7\ta\n7\tb\n").unwrap_err();
        assert!(err.to_string().contains("7"), "{err}");
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn empty_file_is_empty_table() {
        assert!(TokenTable::parse("t", b"").unwrap().is_empty());
    }

    #[test]
    fn non_utf8_is_rejected() {
        assert!(TokenTable::parse("t", b"0\t\xff\xfe\n").is_err());
        assert!(TokenTable::parse("t", b"0\t\\xff\n").is_err());
    }

    #[test]
    fn escape_round_trip() {
        for s in [" love", "love ", "a\tb", "x\\y", "\u{1}", "  two", "日本"] {
            assert_eq!(unescape(&escape(s)).unwrap(), s);
        }
        assert_eq!(escape(" love"), "\\x20love");
        assert_eq!(escape("b c"), "b c");
    }

    #[test]
    fn six_variants_for_love() {
        let g = surface_variants("love").unwrap();
        assert_eq!(g.variants, vec!["love", " love", "Love", " Love", "LOVE", " LOVE"]);
    }

    #[test]
    fn single_letter_collapses() {
        let g = surface_variants("a").unwrap();
        assert_eq!(g.variants, vec!["a", " a", "A", " A"]);
        assert!(surface_variants("").is_err());
        assert!(surface_variants(" a").is_err());
    }

    #[test]
    fn uppercase_can_be_disabled() {
        let g = surface_variants_with("love", VariantForms { uppercase: false }).unwrap();
        assert_eq!(g.variants.len(), 4);
    }

    #[test]
    fn intersection_rules() {
        let lex = lexicon("love communion\nfreedom agency\n");
        let a = TokenTable::from_entries("a", [(0, " love"), (1, "freedom")]).unwrap();
        let b = TokenTable::from_entries("b", [(5, "love")]).unwrap();
        let m = intersect(&a, &b, &lex, VariantForms::default());
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].word, "love");
        assert_eq!(m[0].in_a, vec![(" love".to_string(), 0)]);
        assert_eq!(m[0].in_b, vec![("love".to_string(), 5)]);

        let same = intersect(&a, &a, &lex, VariantForms::default());
        assert_eq!(same.len(), 2);
        assert!(same.iter().all(|w| w.in_a == w.in_b));
    }
}
