//! Implicit-reward measures between two next-token distributions.
//!
//! For a source distribution `p` and a target distribution `q` over the same
//! prompt, the log-ratio `ln q − ln p` is (up to a per-prompt constant and a
//! scale `beta`) the reward under which `q` is the KL-regularized finetune of
//! `p`. The raw log-ratio is dominated by tail tokens that neither model
//! would emit, so the weighted variants below damp those contributions. The
//! mixture-weighted log-ratio (MWLR) weights by `½(p + q)`.
//!
//! | kind | value |
//! |------|-------|
//! | LLR  | `ln q − ln p` |
//! | LR20 | `max(ln q, −20) − max(ln p, −20)` |
//! | LR10 | `max(ln q, −10) − max(ln p, −10)` |
//! | P1LR | `p · (ln q − ln p)` |
//! | P2LR | `q · (ln q − ln p)` |
//! | MWLR | `½(p + q) · (ln q − ln p)` |
//! | GMLR | `√(pq) · (ln q − ln p)` |
//! | JSLR | `½(q ln(q/m) − p ln(p/m))`, `m = ½(p + q)` |
//!
//! Every value is multiplied by `beta`. Natural logarithms throughout.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoretable::{ProbRow, ProbTable};
use crate::vocab::VariantGroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Llr,
    Lr20,
    Lr10,
    P1lr,
    P2lr,
    Mwlr,
    Gmlr,
    Jslr,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 8] = [
        MeasureKind::Llr,
        MeasureKind::Lr20,
        MeasureKind::Lr10,
        MeasureKind::P1lr,
        MeasureKind::P2lr,
        MeasureKind::Mwlr,
        MeasureKind::Gmlr,
        MeasureKind::Jslr,
    ];

    /// Kinds for which swapping source and target negates every value.
    pub const ANTISYMMETRIC: [MeasureKind; 5] = [
        MeasureKind::Llr,
        MeasureKind::Lr20,
        MeasureKind::Lr10,
        MeasureKind::Mwlr,
        MeasureKind::Gmlr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Llr => "llr",
            MeasureKind::Lr20 => "lr20",
            MeasureKind::Lr10 => "lr10",
            MeasureKind::P1lr => "p1lr",
            MeasureKind::P2lr => "p2lr",
            MeasureKind::Mwlr => "mwlr",
            MeasureKind::Gmlr => "gmlr",
            MeasureKind::Jslr => "jslr",
        }
    }

    /// Unscaled per-token value for source probability `p` and target probability `q`.
    pub fn token_value(self, p: f64, q: f64) -> f64 {
        let (log_p, log_q) = (p.ln(), q.ln());
        let log_ratio = log_q - log_p;
        match self {
            MeasureKind::Llr => log_ratio,
            MeasureKind::Lr20 => log_q.max(-20.0) - log_p.max(-20.0),
            MeasureKind::Lr10 => log_q.max(-10.0) - log_p.max(-10.0),
            MeasureKind::P1lr => p * log_ratio,
            MeasureKind::P2lr => q * log_ratio,
            MeasureKind::Mwlr => 0.5 * (p + q) * log_ratio,
            MeasureKind::Gmlr => (p * q).sqrt() * log_ratio,
            MeasureKind::Jslr => {
                let m = 0.5 * (p + q);
                0.5 * (q * (q / m).ln() - p * (p / m).ln())
            }
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s) || k.name().eq_ignore_ascii_case(&s.replace('-', "")))
            .ok_or_else(|| Error::Argument(format!("unknown measure kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureConfig {
    pub kind: MeasureKind,
    /// Pure scale; must be positive.
    pub beta: f64,
}

impl MeasureConfig {
    pub fn new(kind: MeasureKind) -> Self {
        MeasureConfig { kind, beta: 1.0 }
    }

    pub fn with_beta(kind: MeasureKind, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Argument(format!("beta must be positive, got {beta}")));
        }
        Ok(MeasureConfig { kind, beta })
    }
}

/// Per-token implicit-reward values for an ordered model pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub source_model: String,
    pub target_model: String,
    pub prompt_id: String,
    pub kind: MeasureKind,
    /// Keyed by source-tokenizer id; the key set is the evaluated id set.
    pub values: BTreeMap<u32, f64>,
    /// Source surfaces of the evaluated ids.
    pub tokens: BTreeMap<u32, String>,
}

impl MeasureResult {
    pub fn shared_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.values.keys().copied()
    }

    pub fn surface_index(&self) -> BTreeMap<String, u32> {
        let mut index = BTreeMap::new();
        for (id, token) in &self.tokens {
            index.entry(token.clone()).or_insert(*id);
        }
        index
    }
}

/// Source id → target id.
pub type IdMapping = BTreeMap<u32, u32>;

/// Maps ids whose surfaces are identical in both tables.
pub fn surface_mapping(p: &ProbTable, q: &ProbTable) -> IdMapping {
    let mut target_index: BTreeMap<&str, u32> = BTreeMap::new();
    for (id, row) in &q.rows {
        target_index.entry(row.token.as_str()).or_insert(*id);
    }
    p.rows
        .iter()
        .filter_map(|(id, row)| target_index.get(row.token.as_str()).map(|t| (*id, *t)))
        .collect()
}

/// Evaluates `cfg.kind` over the ids both tables share.
///
/// Tables from different tokenizers must go through [`compute_measure_mapped`].
pub fn compute_measure(p: &ProbTable, q: &ProbTable, cfg: MeasureConfig) -> Result<MeasureResult> {
    if p.tokenizer_id != q.tokenizer_id {
        return Err(Error::Pairing(format!(
            "tokenizers `{}` and `{}` differ; supply an id mapping",
            p.tokenizer_id, q.tokenizer_id
        )));
    }
    check_pair(p, q, cfg)?;
    // Both maps iterate in id order, so a merge walk finds the shared ids.
    let mut source = p.rows.iter().peekable();
    let mut target = q.rows.iter().peekable();
    let shared = std::iter::from_fn(move || loop {
        let (sid, _) = source.peek()?;
        let (tid, _) = target.peek()?;
        match sid.cmp(tid) {
            std::cmp::Ordering::Less => {
                source.next();
            }
            std::cmp::Ordering::Greater => {
                target.next();
            }
            std::cmp::Ordering::Equal => {
                let (id, s) = source.next()?;
                let (_, t) = target.next()?;
                return Some((*id, s, t));
            }
        }
    });
    evaluate(p, q, cfg, shared)
}

/// Evaluates `cfg.kind` over the pairs in `mapping` present in both tables.
pub fn compute_measure_mapped(
    p: &ProbTable,
    q: &ProbTable,
    cfg: MeasureConfig,
    mapping: &IdMapping,
) -> Result<MeasureResult> {
    check_pair(p, q, cfg)?;
    let pairs = mapping
        .iter()
        .filter_map(|(sid, tid)| Some((*sid, p.rows.get(sid)?, q.rows.get(tid)?)));
    evaluate(p, q, cfg, pairs)
}

fn check_pair(p: &ProbTable, q: &ProbTable, cfg: MeasureConfig) -> Result<()> {
    if p.prompt_id != q.prompt_id {
        return Err(Error::Pairing(format!(
            "prompt `{}` cannot be compared with prompt `{}`",
            p.prompt_id, q.prompt_id
        )));
    }
    if cfg.beta.is_nan() || cfg.beta <= 0.0 {
        return Err(Error::Argument(format!("beta must be positive, got {}", cfg.beta)));
    }
    Ok(())
}

/// `pairs` must yield source ids in ascending order.
fn evaluate<'a>(
    p: &ProbTable,
    q: &ProbTable,
    cfg: MeasureConfig,
    pairs: impl Iterator<Item = (u32, &'a ProbRow, &'a ProbRow)>,
) -> Result<MeasureResult> {
    let mut values = Vec::new();
    let mut tokens = Vec::new();
    for (id, source, target) in pairs {
        values.push((id, cfg.beta * cfg.kind.token_value(source.prob, target.prob)));
        tokens.push((id, source.token.clone()));
    }
    if values.is_empty() {
        return Err(Error::Domain("the two tables share no token ids".into()));
    }
    Ok(MeasureResult {
        source_model: p.model_id.clone(),
        target_model: q.model_id.clone(),
        prompt_id: p.prompt_id.clone(),
        kind: cfg.kind,
        values: values.into_iter().collect(),
        tokens: tokens.into_iter().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedToken {
    pub id: u32,
    pub token: String,
    pub value: f64,
}

/// The `k` largest values (descending) and `k` smallest (ascending); ties by ascending id.
pub fn top_bottom(result: &MeasureResult, k: usize) -> Result<(Vec<RankedToken>, Vec<RankedToken>)> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    let mut order: Vec<(u32, f64)> = result.values.iter().map(|(id, v)| (*id, *v)).collect();
    let ranked = |list: &[(u32, f64)]| -> Vec<RankedToken> {
        list.iter()
            .take(k)
            .map(|(id, value)| RankedToken {
                id: *id,
                token: result.tokens.get(id).cloned().unwrap_or_default(),
                value: *value,
            })
            .collect()
    };
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let top = ranked(&order);
    order.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let bottom = ranked(&order);
    Ok((top, bottom))
}

/// Mean value over the variants of `group` that resolve to evaluated ids.
pub fn average_over_variants(
    result: &MeasureResult,
    group: &VariantGroup,
    id_map: &BTreeMap<String, u32>,
) -> Result<f64> {
    let values: Vec<f64> = group
        .variants
        .iter()
        .filter_map(|v| id_map.get(v))
        .filter_map(|id| result.values.get(id))
        .copied()
        .collect();
    if values.is_empty() {
        return Err(Error::MissingWord(group.canonical.clone()));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// One ordered (source → target) comparison of two words.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCell {
    pub source: String,
    pub target: String,
    pub value_a: Option<f64>,
    pub value_b: Option<f64>,
    /// `value_a − value_b`; absent when either word does not resolve.
    pub gap: Option<f64>,
}

/// Gap between two words' variant-averaged values for every source × target pair.
///
/// Self-pairs (same model id) are skipped. Tables from different tokenizers
/// are matched on identical surfaces.
pub fn pairwise_gap_grid(
    sources: &[(String, ProbTable)],
    targets: &[(String, ProbTable)],
    word_a: &VariantGroup,
    word_b: &VariantGroup,
    cfg: MeasureConfig,
) -> Result<Vec<GapCell>> {
    let mut models: Vec<&str> = sources.iter().chain(targets).map(|(id, _)| id.as_str()).collect();
    models.sort_unstable();
    models.dedup();
    if models.len() < 2 {
        return Err(Error::Argument("a gap grid needs at least two models".into()));
    }
    let mut cells = Vec::new();
    for (source_id, p) in sources {
        for (target_id, q) in targets {
            if source_id == target_id {
                continue;
            }
            let mapping = if p.tokenizer_id == q.tokenizer_id {
                p.rows.keys().filter(|id| q.rows.contains_key(id)).map(|id| (*id, *id)).collect()
            } else {
                surface_mapping(p, q)
            };
            let result = match compute_measure_mapped(p, q, cfg, &mapping) {
                Ok(r) => Some(r),
                Err(Error::Domain(_)) => None,
                Err(e) => return Err(e),
            };
            let (value_a, value_b) = match &result {
                Some(r) => {
                    let index = r.surface_index();
                    (
                        average_over_variants(r, word_a, &index).ok(),
                        average_over_variants(r, word_b, &index).ok(),
                    )
                }
                None => (None, None),
            };
            cells.push(GapCell {
                source: source_id.clone(),
                target: target_id.clone(),
                value_a,
                value_b,
                gap: value_a.zip(value_b).map(|(a, b)| a - b),
            });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::surface_variants;

    fn fixture() -> (ProbTable, ProbTable) {
        (
            ProbTable::from_probs("p", "x", &[0.5, 0.5]),
            ProbTable::from_probs("q", "x", &[0.9, 0.1]),
        )
    }

    fn values(kind: MeasureKind) -> Vec<f64> {
        let (p, q) = fixture();
        compute_measure(&p, &q, MeasureConfig::new(kind)).unwrap().values.into_values().collect()
    }

    #[test]
    fn llr_fixture() {
        let v = values(MeasureKind::Llr);
        assert!((v[0] - 0.5877866649021191).abs() < 1e-12);
        assert!((v[1] - -1.6094379124341003).abs() < 1e-12);
    }

    #[test]
    fn mwlr_and_gmlr_fixture() {
        // Reference values evaluated at 40 digits: 0.7·ln 1.8, 0.3·ln 0.2 and √0.45·ln 1.8.
        let v = values(MeasureKind::Mwlr);
        assert!((v[0] - 0.41145066543148334).abs() < 1e-12);
        assert!((v[1] - -0.48283137373023006).abs() < 1e-12);
        let g = values(MeasureKind::Gmlr);
        assert!((g[0] - 0.3942992816967084).abs() < 1e-12);
    }

    #[test]
    fn equal_distributions_give_zero() {
        let p = ProbTable::from_probs("p", "x", &[0.2, 0.3, 0.5]);
        for kind in MeasureKind::ALL {
            let r = compute_measure(&p, &p, MeasureConfig::new(kind)).unwrap();
            assert!(r.values.values().all(|v| *v == 0.0), "{kind}");
        }
    }

    #[test]
    fn caps_bound_log_ratios() {
        let v = MeasureKind::Lr10.token_value(1e-12, 1.0);
        assert_eq!(v, 10.0);
        let v = MeasureKind::Lr20.token_value(1e-12, 1.0);
        assert!((v - 20.0).abs() < 1e-12);
    }

    #[test]
    fn pairing_errors() {
        let p = ProbTable::from_probs("p", "x", &[1.0]);
        let q = ProbTable::from_probs("q", "y", &[1.0]);
        assert!(matches!(compute_measure(&p, &q, MeasureConfig::new(MeasureKind::Llr)), Err(Error::Pairing(_))));
        let empty = ProbTable::from_probs("q", "x", &[]);
        assert!(matches!(compute_measure(&p, &empty, MeasureConfig::new(MeasureKind::Llr)), Err(Error::Domain(_))));
    }

    #[test]
    fn beta_scales_values() {
        let (p, q) = fixture();
        let one = compute_measure(&p, &q, MeasureConfig::new(MeasureKind::Mwlr)).unwrap();
        let two = compute_measure(&p, &q, MeasureConfig::with_beta(MeasureKind::Mwlr, 2.0).unwrap()).unwrap();
        for (a, b) in one.values.values().zip(two.values.values()) {
            assert_eq!(2.0 * a, *b);
        }
        assert!(MeasureConfig::with_beta(MeasureKind::Mwlr, 0.0).is_err());
    }

    #[test]
    fn top_bottom_orders_and_breaks_ties() {
        let (p, q) = fixture();
        let r = compute_measure(&p, &q, MeasureConfig::new(MeasureKind::Mwlr)).unwrap();
        let (top, bottom) = top_bottom(&r, 1).unwrap();
        assert_eq!(top[0].id, 0);
        assert_eq!(bottom[0].id, 1);

        let flat = ProbTable::from_probs("p", "x", &[0.25; 4]);
        let zero = compute_measure(&flat, &flat, MeasureConfig::new(MeasureKind::Mwlr)).unwrap();
        let (top, bottom) = top_bottom(&zero, 3).unwrap();
        let ids = |l: &[RankedToken]| l.iter().map(|t| t.id).collect::<Vec<_>>();
        assert_eq!(ids(&top), vec![0, 1, 2]);
        assert_eq!(ids(&bottom), vec![0, 1, 2]);

        let (top, _) = top_bottom(&zero, 10).unwrap();
        assert_eq!(top.len(), 4);
        assert!(top_bottom(&zero, 0).is_err());
    }

    fn result_with(tokens: &[(&str, f64)]) -> MeasureResult {
        MeasureResult {
            source_model: "a".into(),
            target_model: "b".into(),
            prompt_id: "x".into(),
            kind: MeasureKind::Mwlr,
            values: tokens.iter().enumerate().map(|(i, (_, v))| (i as u32, *v)).collect(),
            tokens: tokens.iter().enumerate().map(|(i, (s, _))| (i as u32, s.to_string())).collect(),
        }
    }

    #[test]
    fn variant_averaging() {
        let g = surface_variants("love").unwrap();
        let r = result_with(&[(" Love", 0.2), ("Love", 0.4), ("hate", 9.0)]);
        assert!((average_over_variants(&r, &g, &r.surface_index()).unwrap() - 0.3).abs() < 1e-15);
        let r = result_with(&[(" love", 0.7)]);
        assert_eq!(average_over_variants(&r, &g, &r.surface_index()).unwrap(), 0.7);
        let r = result_with(&[("hate", 0.7)]);
        assert!(matches!(average_over_variants(&r, &g, &r.surface_index()), Err(Error::MissingWord(w)) if w == "love"));
    }

    #[test]
    fn kind_names_parse() {
        for k in MeasureKind::ALL {
            assert_eq!(k.name().parse::<MeasureKind>().unwrap(), k);
        }
        assert_eq!("LR-20".parse::<MeasureKind>().unwrap(), MeasureKind::Lr20);
        assert!("kl".parse::<MeasureKind>().is_err());
    }
}
