//! Audit pipelines built on the lower-level modules: construct-rank
//! summaries, top-k construct profiles, checkpoint rank changes and the
//! synthetic boost-recovery validation of implicit-reward measures.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::Lexicon;
use crate::error::{Error, Result};
use crate::measures::{compute_measure, top_bottom, MeasureConfig, MeasureKind, MeasureResult};
use crate::prompts::{PromptSpec, Valence};
use crate::scoretable::{ProbRow, ProbTable, ScoreTable, NORMALIZATION_TOLERANCE};
use crate::stats::{
    self, adjust, construct_word_ranks, kendall_tau_b, median, ranks, Adjustment, StatResult, WordIds,
};
use crate::vocab::{canonicalize, intersect, surface_variants_with, TokenTable, VariantForms};

/// Token ids of every surface variant of each lexicon word present in `table`.
pub fn word_ids(table: &ScoreTable, lexicon: &Lexicon, forms: VariantForms) -> WordIds {
    let index = table.surface_index();
    lexicon
        .entries
        .keys()
        .filter_map(|word| {
            let group = surface_variants_with(word, forms).ok()?;
            let ids: Vec<u32> = group.variants.iter().filter_map(|v| index.get(v.as_str()).copied()).collect();
            (!ids.is_empty()).then(|| (word.clone(), ids))
        })
        .collect()
}

/// Which tokens an audit ranks.
#[derive(Debug, Clone, PartialEq)]
pub enum AuditScope {
    /// Every row of each table.
    Full,
    /// Only the listed words, ranked among the listed ids of each tokenizer.
    Subset {
        words: BTreeSet<String>,
        ids: BTreeMap<String, BTreeSet<u32>>,
    },
}

impl AuditScope {
    /// Lexicon words that are single tokens in both vocabularies.
    pub fn intersection(a: &TokenTable, b: &TokenTable, lexicon: &Lexicon, forms: VariantForms) -> Self {
        let matches = intersect(a, b, lexicon, forms);
        let mut ids: BTreeMap<String, BTreeSet<u32>> = BTreeMap::new();
        for m in &matches {
            ids.entry(a.tokenizer_id.clone()).or_default().extend(m.in_a.iter().map(|(_, id)| *id));
            ids.entry(b.tokenizer_id.clone()).or_default().extend(m.in_b.iter().map(|(_, id)| *id));
        }
        AuditScope::Subset {
            words: matches.into_iter().map(|m| m.word).collect(),
            ids,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructSummary {
    pub model_id: String,
    pub prompt_id: String,
    pub construct: String,
    pub valence: Valence,
    pub median_rank: f64,
    pub n_words: usize,
    /// Number of ranked tokens in the table's scope.
    pub n_ranked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditWarning {
    pub model_id: String,
    pub prompt_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SummaryReport {
    pub summaries: Vec<ConstructSummary>,
    pub warnings: Vec<AuditWarning>,
}

/// One summary per (model, prompt, construct) with at least one resolvable word.
pub fn construct_summaries(
    tables: &[ScoreTable],
    lexicon: &Lexicon,
    prompts: &[PromptSpec],
    scope: &AuditScope,
    forms: VariantForms,
) -> Result<SummaryReport> {
    let valence_of: BTreeMap<&str, Valence> = prompts.iter().map(|p| (p.id.as_str(), p.valence)).collect();
    let mut report = SummaryReport::default();
    for table in tables {
        let valence = *valence_of
            .get(table.prompt_id.as_str())
            .ok_or_else(|| Error::Argument(format!("prompt `{}` is not in the prompt list", table.prompt_id)))?;
        let warn = |report: &mut SummaryReport, message: String| {
            report.warnings.push(AuditWarning {
                model_id: table.model_id.clone(),
                prompt_id: table.prompt_id.clone(),
                message,
            })
        };

        let mut ids = word_ids(table, lexicon, forms);
        let rank_table = match scope {
            AuditScope::Full => ranks(table, None),
            AuditScope::Subset { words, ids: allowed } => {
                let Some(allowed) = allowed.get(&table.tokenizer_id) else {
                    warn(&mut report, format!("tokenizer `{}` is outside the audit scope", table.tokenizer_id));
                    continue;
                };
                ids.retain(|w, v| {
                    v.retain(|id| allowed.contains(id));
                    words.contains(w) && !v.is_empty()
                });
                let subset: BTreeSet<u32> = ids.values().flatten().copied().collect();
                ranks(table, Some(&subset))
            }
        };
        let rank_table = match rank_table {
            Ok(rt) => rt,
            Err(Error::Domain(msg)) => {
                warn(&mut report, msg);
                continue;
            }
            Err(e) => return Err(e),
        };

        for construct in &lexicon.constructs {
            let word_ranks = construct_word_ranks(&rank_table, lexicon, construct, &ids);
            match median(&word_ranks) {
                Some(median_rank) => report.summaries.push(ConstructSummary {
                    model_id: table.model_id.clone(),
                    prompt_id: table.prompt_id.clone(),
                    construct: construct.clone(),
                    valence,
                    median_rank,
                    n_words: word_ranks.len(),
                    n_ranked: rank_table.n,
                }),
                None => warn(&mut report, format!("construct `{construct}` has no resolvable words")),
            }
        }
    }
    Ok(report)
}

/// Tab-separated export, one row per summary.
pub fn summaries_to_tsv(summaries: &[ConstructSummary]) -> String {
    let mut out = String::from("model_id\tprompt_id\tvalence\tconstruct\tmedian_rank\tn_words\tn_ranked\n");
    for s in summaries {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.model_id,
            s.prompt_id,
            s.valence.as_str(),
            s.construct,
            s.median_rank,
            s.n_words,
            s.n_ranked
        );
    }
    out
}

/// Median-rank contrast of one construct between two models.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contrast {
    pub construct: String,
    pub valence: Valence,
    pub model_a: String,
    pub model_b: String,
    pub median_a: f64,
    pub median_b: f64,
    pub permutation: StatResult,
    pub welch: Option<StatResult>,
    pub p_bonferroni: f64,
    pub p_bh_fdr: f64,
}

/// Permutation and Welch tests on per-prompt median ranks for every
/// (construct, valence) and model pair, adjusted across the whole family.
pub fn construct_contrasts(summaries: &[ConstructSummary], n_perm: u64, seed: u64) -> Result<Vec<Contrast>> {
    let mut groups: BTreeMap<(String, Valence, String), Vec<f64>> = BTreeMap::new();
    for s in summaries {
        groups
            .entry((s.construct.clone(), s.valence, s.model_id.clone()))
            .or_default()
            .push(s.median_rank);
    }
    let keys: Vec<_> = groups.keys().cloned().collect();
    let mut contrasts = Vec::new();
    for (i, (construct, valence, model_a)) in keys.iter().enumerate() {
        for (c2, v2, model_b) in &keys[i + 1..] {
            if c2 != construct || v2 != valence {
                continue;
            }
            let a = &groups[&(construct.clone(), *valence, model_a.clone())];
            let b = &groups[&(construct.clone(), *valence, model_b.clone())];
            if a.len() < 2 || b.len() < 2 {
                continue;
            }
            contrasts.push(Contrast {
                construct: construct.clone(),
                valence: *valence,
                model_a: model_a.clone(),
                model_b: model_b.clone(),
                median_a: median(a).unwrap_or(f64::NAN),
                median_b: median(b).unwrap_or(f64::NAN),
                permutation: stats::perm_t_test(a, b, n_perm, seed)?,
                welch: stats::welch_t(a, b).ok(),
                p_bonferroni: 1.0,
                p_bh_fdr: 1.0,
            });
        }
    }
    let raw: Vec<f64> = contrasts.iter().map(|c| c.permutation.p_value).collect();
    if !raw.is_empty() {
        let bonf = adjust(&raw, Adjustment::Bonferroni { m: raw.len() })?;
        let bh = adjust(&raw, Adjustment::BhFdr)?;
        for ((c, b), f) in contrasts.iter_mut().zip(bonf).zip(bh) {
            c.p_bonferroni = b;
            c.p_bh_fdr = f;
        }
    }
    Ok(contrasts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopkEntry {
    pub lexicon: String,
    pub construct: String,
    pub count: usize,
    /// Mean 1-based position of the construct's tokens; absent when none made the top k.
    pub mean_rank: Option<f64>,
}

/// Construct membership of the `k` highest-scoring tokens.
///
/// With `within`, only tokens whose surface also exists in that vocabulary
/// are candidates.
pub fn topk_profile(table: &ScoreTable, lexicons: &[Lexicon], k: usize, within: Option<&TokenTable>) -> Result<Vec<TopkEntry>> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    let mut rows: Vec<(u32, &str, f64)> = table
        .rows
        .iter()
        .filter(|(_, r)| within.is_none_or(|v| v.contains_surface(&r.token)))
        .map(|(id, r)| (*id, r.token.as_str(), r.score))
        .collect();
    rows.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));

    let mut positions: BTreeMap<(usize, &str), Vec<usize>> = BTreeMap::new();
    for (pos, (_, token, _)) in rows.iter().take(k).enumerate() {
        let word = canonicalize(token);
        for (li, lexicon) in lexicons.iter().enumerate() {
            for construct in lexicon.construct_of(&word) {
                let key = lexicon.constructs.iter().find(|c| **c == construct).map(String::as_str);
                if let Some(key) = key {
                    positions.entry((li, key)).or_default().push(pos + 1);
                }
            }
        }
    }
    Ok(lexicons
        .iter()
        .enumerate()
        .flat_map(|(li, lexicon)| {
            let positions = &positions;
            lexicon.constructs.iter().map(move |construct| {
                let hits = positions.get(&(li, construct.as_str()));
                TopkEntry {
                    lexicon: lexicon.name.clone(),
                    construct: construct.clone(),
                    count: hits.map_or(0, Vec::len),
                    mean_rank: hits.map(|h| h.iter().sum::<usize>() as f64 / h.len() as f64),
                }
            })
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mover {
    pub id: u32,
    pub token: String,
    pub early_rank: f64,
    pub late_rank: f64,
    /// `early_rank − late_rank`; positive means the token moved up.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoverReport {
    pub k: usize,
    pub risers: Vec<Mover>,
    pub fallers: Vec<Mover>,
}

/// Largest rank changes between two checkpoints, ranked within `subset`.
pub fn rank_change(early: &ScoreTable, late: &ScoreTable, subset: &BTreeSet<u32>, k: usize) -> Result<MoverReport> {
    if subset.is_empty() {
        return Err(Error::Domain("rank change needs a non-empty subset".into()));
    }
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    let before = ranks(early, Some(subset))?;
    let after = ranks(late, Some(subset))?;
    let movers: Vec<Mover> = subset
        .iter()
        .map(|id| {
            let (e, l) = (before.ranks[id], after.ranks[id]);
            Mover {
                id: *id,
                token: early.rows[id].token.clone(),
                early_rank: e,
                late_rank: l,
                delta: e - l,
            }
        })
        .collect();
    let mut risers: Vec<Mover> = movers.iter().filter(|m| m.delta > 0.0).cloned().collect();
    risers.sort_by(|a, b| b.delta.total_cmp(&a.delta).then(a.id.cmp(&b.id)));
    risers.truncate(k);
    let mut fallers: Vec<Mover> = movers.into_iter().filter(|m| m.delta < 0.0).collect();
    fallers.sort_by(|a, b| a.delta.total_cmp(&b.delta).then(a.id.cmp(&b.id)));
    fallers.truncate(k);
    Ok(MoverReport { k, risers, fallers })
}

/// Kendall τ-b between each checkpoint's ranks and the final checkpoint's, within `subset`.
pub fn checkpoint_trajectory(checkpoints: &[ScoreTable], subset: &BTreeSet<u32>) -> Result<Vec<f64>> {
    let last = checkpoints
        .last()
        .ok_or_else(|| Error::Domain("no checkpoints given".into()))?;
    let final_ranks = ranks(last, Some(subset))?;
    let reference: Vec<f64> = final_ranks.ranks.values().copied().collect();
    checkpoints
        .iter()
        .map(|c| {
            let rt = ranks(c, Some(subset))?;
            kendall_tau_b(&rt.ranks.values().copied().collect::<Vec<_>>(), &reference)
        })
        .collect()
}

/// A synthetic multiplicative preference for target tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostSpec {
    pub targets: BTreeSet<u32>,
    pub factor: f64,
}

impl BoostSpec {
    pub fn new(targets: impl IntoIterator<Item = u32>, factor: f64) -> Result<Self> {
        let targets: BTreeSet<u32> = targets.into_iter().collect();
        if targets.is_empty() {
            return Err(Error::Argument("boost needs at least one target".into()));
        }
        if !(factor > 1.0 && factor.is_finite()) {
            return Err(Error::Argument(format!("boost factor must exceed 1, got {factor}")));
        }
        Ok(BoostSpec { targets, factor })
    }
}

/// Multiplies target probabilities by the factor and renormalizes to the original mass.
///
/// `q_i = b·p_i / Z` on targets and `p_i / Z` elsewhere, with
/// `Z = (Σp + (b − 1)·Σ_T p) / Σp`, which is `1 + (b − 1)·Σ_T p` for a normalized `p`.
pub fn boost(p: &ProbTable, spec: &BoostSpec) -> Result<ProbTable> {
    if let Some(missing) = spec.targets.iter().find(|id| !p.rows.contains_key(id)) {
        return Err(Error::Argument(format!("boost target id {missing} is not in the table")));
    }
    let total = p.total();
    if total > 1.0 + NORMALIZATION_TOLERANCE {
        return Err(Error::Value(format!("probabilities sum to {total}, above 1")));
    }
    let target_mass: f64 = spec.targets.iter().map(|id| p.rows[id].prob).sum();
    let z = (total + (spec.factor - 1.0) * target_mass) / total;
    let rows = p
        .rows
        .iter()
        .map(|(id, row)| {
            let scale = if spec.targets.contains(id) { spec.factor } else { 1.0 };
            (
                *id,
                ProbRow {
                    token: row.token.clone(),
                    prob: scale * row.prob / z,
                },
            )
        })
        .collect();
    Ok(ProbTable {
        model_id: format!("{}+boost", p.model_id),
        tokenizer_id: p.tokenizer_id.clone(),
        prompt_id: p.prompt_id.clone(),
        rows,
    })
}

/// Number of targets among the `k` highest values.
pub fn recovery(result: &MeasureResult, targets: &BTreeSet<u32>, k: usize) -> Result<usize> {
    if let Some(missing) = targets.iter().find(|id| !result.values.contains_key(id)) {
        return Err(Error::Argument(format!("target id {missing} was not evaluated")));
    }
    let (top, _) = top_bottom(result, k)?;
    Ok(top.iter().filter(|t| targets.contains(&t.id)).count())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryRow {
    pub kind: MeasureKind,
    pub recovered: usize,
    pub targets: usize,
    pub k: usize,
}

/// Recovery counts of every measure kind for a base/boosted pair.
pub fn measure_comparison(base: &ProbTable, boosted: &ProbTable, targets: &BTreeSet<u32>, k: usize) -> Result<Vec<RecoveryRow>> {
    MeasureKind::ALL
        .into_iter()
        .map(|kind| {
            let result = compute_measure(base, boosted, MeasureConfig::new(kind))?;
            Ok(RecoveryRow {
                kind,
                recovered: recovery(&result, targets, k)?,
                targets: targets.len(),
                k,
            })
        })
        .collect()
}
