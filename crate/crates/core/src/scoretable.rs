//! Per-token score tables: the line-delimited JSON wire format shared with
//! score extractors, plus conversion of log-probabilities to probabilities.
//!
//! Line 1 is a header object; every following non-blank line is a row
//! `{"id": <int>, "token": <string>, "score": <number>}`. Scores are written
//! with 17 significant digits so every finite double survives a round trip.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Allowed deviation of Σexp(logprob) from 1 for complete-vocabulary tables.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-3;

/// Default floor applied by [`to_probabilities`].
pub const PROBABILITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreKind {
    Reward,
    Logprob,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub token: String,
    pub score: f64,
}

/// Scores for every evaluated token of one (model, prompt) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub model_id: String,
    pub tokenizer_id: String,
    pub prompt_id: String,
    pub prompt_text: String,
    pub score_kind: ScoreKind,
    pub complete_vocab: bool,
    pub rows: BTreeMap<u32, Row>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    schema_version: u32,
    model_id: String,
    tokenizer_id: String,
    prompt_id: String,
    prompt_text: String,
    score_kind: ScoreKind,
    complete_vocab: bool,
}

#[derive(Deserialize)]
struct RowDoc {
    id: u32,
    token: String,
    score: serde_json::Value,
}

impl ScoreTable {
    pub fn new(
        model_id: impl Into<String>,
        tokenizer_id: impl Into<String>,
        prompt_id: impl Into<String>,
        score_kind: ScoreKind,
    ) -> Self {
        ScoreTable {
            model_id: model_id.into(),
            tokenizer_id: tokenizer_id.into(),
            prompt_id: prompt_id.into(),
            prompt_text: String::new(),
            score_kind,
            complete_vocab: false,
            rows: BTreeMap::new(),
        }
    }

    /// Adds a row, rejecting duplicate ids and non-finite scores.
    pub fn insert(&mut self, id: u32, token: impl Into<String>, score: f64) -> Result<()> {
        if !score.is_finite() {
            return Err(Error::Value(format!("token id {id}: non-finite score {score}")));
        }
        if self.rows.contains_key(&id) {
            return Err(Error::Format(format!("duplicate token id {id}")));
        }
        self.rows.insert(
            id,
            Row {
                token: token.into(),
                score,
            },
        );
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn score(&self, id: u32) -> Option<f64> {
        self.rows.get(&id).map(|r| r.score)
    }

    /// Ids whose surface equals `surface` exactly.
    pub fn ids_with_surface<'a>(&'a self, surface: &'a str) -> impl Iterator<Item = u32> + 'a {
        self.rows.iter().filter(move |(_, r)| r.token == surface).map(|(id, _)| *id)
    }

    /// Surface → lowest id carrying it.
    pub fn surface_index(&self) -> BTreeMap<&str, u32> {
        let mut index = BTreeMap::new();
        for (id, row) in &self.rows {
            index.entry(row.token.as_str()).or_insert(*id);
        }
        index
    }

    /// Checks the normalization invariant of complete log-probability tables.
    pub fn check_normalization(&self) -> Result<()> {
        if self.score_kind != ScoreKind::Logprob || !self.complete_vocab {
            return Ok(());
        }
        let total: f64 = self.rows.values().map(|r| r.score.exp()).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Value(format!(
                "complete-vocabulary log-probabilities sum to {total} after exponentiation, expected 1 ± {NORMALIZATION_TOLERANCE}"
            )));
        }
        Ok(())
    }

    /// Writes the table; returns the number of bytes written.
    pub fn write<W: Write>(&self, sink: &mut W) -> Result<usize> {
        write_score_table(self, sink)
    }
}

/// Formats a finite double with 17 significant digits.
pub fn format_score(score: f64) -> String {
    format!("{score:.16e}")
}

pub fn write_score_table<W: Write>(table: &ScoreTable, sink: &mut W) -> Result<usize> {
    let header = Header {
        schema_version: SCHEMA_VERSION,
        model_id: table.model_id.clone(),
        tokenizer_id: table.tokenizer_id.clone(),
        prompt_id: table.prompt_id.clone(),
        prompt_text: table.prompt_text.clone(),
        score_kind: table.score_kind,
        complete_vocab: table.complete_vocab,
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for (id, row) in &table.rows {
        let token = serde_json::to_string(&row.token).expect("string serializes");
        out.push_str(&format!(
            "{{\"id\":{id},\"token\":{token},\"score\":{}}}\n",
            format_score(row.score)
        ));
    }
    sink.write_all(out.as_bytes())?;
    Ok(out.len())
}

/// Quotes a bare `NaN`/`Infinity` score literal so the row can be reported by id.
fn quote_bare_nonfinite(line: &str) -> Option<String> {
    let key = line.find("\"score\"")?;
    let after_key = key + "\"score\"".len();
    let colon = after_key + line[after_key..].find(':')?;
    let value_start = colon + 1 + (line[colon + 1..].len() - line[colon + 1..].trim_start().len());
    let value = &line[value_start..];
    for literal in ["-Infinity", "+Infinity", "Infinity", "-inf", "+inf", "inf", "NaN", "nan"] {
        if value.starts_with(literal) {
            let end = value_start + literal.len();
            return Some(format!("{}\"{literal}\"{}", &line[..value_start], &line[end..]));
        }
    }
    None
}

fn row_score(value: &serde_json::Value, id: u32, line: usize) -> Result<f64> {
    let score = match value {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::String(s) => s.trim().parse::<f64>().ok(),
        _ => None,
    };
    match score {
        Some(s) if s.is_finite() => Ok(s),
        Some(s) => Err(Error::Value(format!("line {line}: token id {id}: non-finite score {s}"))),
        None => Err(Error::Format(format!("line {line}: token id {id}: score is not a number"))),
    }
}

/// Parses a score table from line-delimited JSON.
pub fn parse_score_table<R: BufRead>(reader: R) -> Result<ScoreTable> {
    let mut table: Option<ScoreTable> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let Some(table) = table.as_mut() else {
            table = Some(parse_header(&line, line_no)?);
            continue;
        };
        let doc: RowDoc = match serde_json::from_str(&line) {
            Ok(doc) => doc,
            Err(e) => match quote_bare_nonfinite(&line).and_then(|l| serde_json::from_str(&l).ok()) {
                Some(doc) => doc,
                None if e.to_string().contains("out of range") => {
                    return Err(Error::Value(format!("line {line_no}: score out of double range")))
                }
                None => return Err(Error::parse(line_no, format!("row: {e}"))),
            },
        };
        let score = row_score(&doc.score, doc.id, line_no)?;
        if table.rows.contains_key(&doc.id) {
            return Err(Error::Format(format!("line {line_no}: duplicate token id {}", doc.id)));
        }
        table.rows.insert(
            doc.id,
            Row {
                token: doc.token,
                score,
            },
        );
    }
    let table = table.ok_or_else(|| Error::Format("missing header line".into()))?;
    table.check_normalization()?;
    Ok(table)
}

fn parse_header(line: &str, line_no: usize) -> Result<ScoreTable> {
    let value: serde_json::Value =
        serde_json::from_str(line).map_err(|e| Error::parse(line_no, format!("header: {e}")))?;
    if value.get("schema_version").is_none() {
        return Err(Error::Format(format!(
            "line {line_no}: missing header (no `schema_version` field)"
        )));
    }
    let header: Header =
        serde_json::from_value(value).map_err(|e| Error::parse(line_no, format!("header: {e}")))?;
    if header.schema_version != SCHEMA_VERSION {
        return Err(Error::Format(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            header.schema_version
        )));
    }
    Ok(ScoreTable {
        model_id: header.model_id,
        tokenizer_id: header.tokenizer_id,
        prompt_id: header.prompt_id,
        prompt_text: header.prompt_text,
        score_kind: header.score_kind,
        complete_vocab: header.complete_vocab,
        rows: BTreeMap::new(),
    })
}

/// Reads and validates a score table file.
pub fn read_score_table(path: &std::path::Path) -> Result<ScoreTable> {
    let file = std::fs::File::open(path)?;
    parse_score_table(std::io::BufReader::new(file))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbRow {
    pub token: String,
    pub prob: f64,
}

/// Floored next-token probabilities for one (model, prompt) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable {
    pub model_id: String,
    pub tokenizer_id: String,
    pub prompt_id: String,
    pub rows: BTreeMap<u32, ProbRow>,
}

impl ProbTable {
    /// Builds a table directly from probabilities; tokens are named `t<id>`.
    pub fn from_probs(model_id: &str, prompt_id: &str, probs: &[f64]) -> Self {
        ProbTable {
            model_id: model_id.into(),
            tokenizer_id: "synthetic".into(),
            prompt_id: prompt_id.into(),
            rows: probs
                .iter()
                .enumerate()
                .map(|(i, &prob)| {
                    (
                        i as u32,
                        ProbRow {
                            token: format!("t{i}"),
                            prob,
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn prob(&self, id: u32) -> Option<f64> {
        self.rows.get(&id).map(|r| r.prob)
    }

    pub fn total(&self) -> f64 {
        self.rows.values().map(|r| r.prob).sum()
    }

    /// Back to a log-probability score table (no floor removal).
    pub fn to_score_table(&self) -> ScoreTable {
        let mut t = ScoreTable::new(&self.model_id, &self.tokenizer_id, &self.prompt_id, ScoreKind::Logprob);
        for (id, row) in &self.rows {
            t.rows.insert(
                *id,
                Row {
                    token: row.token.clone(),
                    score: row.prob.ln(),
                },
            );
        }
        t
    }
}

pub fn to_probabilities(table: &ScoreTable) -> Result<ProbTable> {
    to_probabilities_with_floor(table, PROBABILITY_FLOOR)
}

/// `p = max(exp(score), floor)`, without renormalization.
pub fn to_probabilities_with_floor(table: &ScoreTable, floor: f64) -> Result<ProbTable> {
    if table.score_kind != ScoreKind::Logprob {
        return Err(Error::Kind("implicit-reward measures require log-probabilities".into()));
    }
    if !(floor > 0.0 && floor < 1.0) {
        return Err(Error::Argument(format!("probability floor {floor} must lie in (0, 1)")));
    }
    Ok(ProbTable {
        model_id: table.model_id.clone(),
        tokenizer_id: table.tokenizer_id.clone(),
        prompt_id: table.prompt_id.clone(),
        rows: table
            .rows
            .iter()
            .map(|(id, row)| {
                (
                    *id,
                    ProbRow {
                        token: row.token.clone(),
                        prob: row.score.exp().max(floor),
                    },
                )
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = r#"{"schema_version":1,"model_id":"m","tokenizer_id":"tok","prompt_id":"positive-111","prompt_text":"What?","score_kind":"reward","complete_vocab":false}"#;

    fn parse(text: &str) -> Result<ScoreTable> {
        parse_score_table(text.as_bytes())
    }

    #[test]
    fn parses_three_rows() {
        let text = format!(
            "{HEADER}\n{{\"id\":0,\"token\":\"a\",\"score\":1.5}}\n{{\"id\":1,\"token\":\" b\",\"score\":-2}}\n{{\"id\":2,\"token\":\"c\",\"score\":0}}\n"
        );
        let t = parse(&text).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.rows[&1].token, " b");
        assert_eq!(t.score(1), Some(-2.0));
    }

    #[test]
    fn nan_rows_are_named() {
        for bad in [r#""NaN""#, "NaN", "Infinity", r#""-inf""#] {
            let text = format!("{HEADER}\n{{\"id\":0,\"token\":\"a\",\"score\":1}}\n{{\"id\":42,\"token\":\"b\",\"score\":{bad}}}\n");
            let err = parse(&text).unwrap_err();
            assert!(matches!(err, Error::Value(_)), "{bad}: {err}");
            assert!(err.to_string().contains("42"), "{err}");
            assert!(err.to_string().contains("line 3"), "{err}");
        }
    }

    #[test]
    fn missing_header_and_duplicates() {
        assert!(matches!(parse("").unwrap_err(), Error::Format(_)));
        assert!(matches!(
            parse("{\"id\":0,\"token\":\"a\",\"score\":1}\n").unwrap_err(),
            Error::Format(_)
        ));
        let dup = format!("{HEADER}\n{{\"id\":3,\"token\":\"a\",\"score\":1}}\n{{\"id\":3,\"token\":\"b\",\"score\":2}}\n");
        let err = parse(&dup).unwrap_err();
        assert!(matches!(err, Error::Format(_)) && err.to_string().contains('3'));
    }

    #[test]
    fn unnormalized_complete_vocab_rejected() {
        let header = HEADER
            .replace("\"reward\"", "\"logprob\"")
            .replace("\"complete_vocab\":false", "\"complete_vocab\":true");
        let half = 0.25f64.ln();
        let text = format!(
            "{header}\n{{\"id\":0,\"token\":\"a\",\"score\":{half}}}\n{{\"id\":1,\"token\":\"b\",\"score\":{half}}}\n"
        );
        assert!(matches!(parse(&text).unwrap_err(), Error::Value(_)));
        let fine = text.replace(&half.to_string(), &0.5f64.ln().to_string());
        assert!(parse(&fine).is_ok());
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let mut t = ScoreTable::new("m", "tok", "p", ScoreKind::Reward);
        for (i, s) in [0.1, 1e-300, -0.0, 5e-324, f64::MAX, -1.7976931348623157e308].iter().enumerate() {
            t.insert(i as u32, format!("tok\"{i}\\"), *s).unwrap();
        }
        let mut buf = Vec::new();
        let n = t.write(&mut buf).unwrap();
        assert_eq!(n, buf.len());
        let back = parse_score_table(buf.as_slice()).unwrap();
        for (id, row) in &t.rows {
            assert_eq!(back.rows[id].score.to_bits(), row.score.to_bits());
            assert_eq!(back.rows[id].token, row.token);
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = ScoreTable::new("m", "tok", "p", ScoreKind::Reward);
        let mut buf = Vec::new();
        t.write(&mut buf).unwrap();
        assert_eq!(buf.iter().filter(|b| **b == b'\n').count(), 1);
        assert_eq!(parse_score_table(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn probabilities_with_floor() {
        let mut t = ScoreTable::new("m", "tok", "p", ScoreKind::Logprob);
        t.insert(0, "a", 0.0).unwrap();
        t.insert(1, "b", -1.0).unwrap();
        t.insert(2, "c", -800.0).unwrap();
        let p = to_probabilities(&t).unwrap();
        assert_eq!(p.prob(0), Some(1.0));
        assert_eq!(p.prob(1), Some(0.36787944117144233));
        assert_eq!(p.prob(2), Some(1e-12));
    }

    #[test]
    fn reward_tables_have_no_probabilities() {
        let t = ScoreTable::new("m", "tok", "p", ScoreKind::Reward);
        let err = to_probabilities(&t).unwrap_err();
        assert!(err.to_string().contains("implicit-reward measures require log-probabilities"));
    }
}
