use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::corpus::Lexicon;
use crate::error::{Error, Result};
use crate::scoretable::ScoreTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankScope {
    FullVocab,
    Subset,
}

/// Fractional descending ranks: 1 is the highest score, ties share their mean position.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub prompt_id: String,
    pub model_id: String,
    pub scope: RankScope,
    pub ranks: BTreeMap<u32, f64>,
    pub n: usize,
}

impl RankTable {
    pub fn rank(&self, id: u32) -> Option<f64> {
        self.ranks.get(&id).copied()
    }
}

/// Ranks the table's scores over all rows, or over `subset` when given.
pub fn ranks(table: &ScoreTable, subset: Option<&BTreeSet<u32>>) -> Result<RankTable> {
    let mut scored: Vec<(u32, f64)> = match subset {
        None => table.rows.iter().map(|(id, r)| (*id, r.score)).collect(),
        Some(ids) => ids
            .iter()
            .map(|id| {
                table
                    .score(*id)
                    .map(|s| (*id, s))
                    .ok_or_else(|| Error::Argument(format!("subset id {id} is not in table `{}`", table.model_id)))
            })
            .collect::<Result<_>>()?,
    };
    if scored.is_empty() {
        return Err(Error::Domain("cannot rank an empty scope".into()));
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut ranks = BTreeMap::new();
    let mut start = 0;
    while start < scored.len() {
        let mut end = start + 1;
        while end < scored.len() && scored[end].1 == scored[start].1 {
            end += 1;
        }
        // Positions start+1 ..= end share their mean.
        let mid = (start + 1 + end) as f64 / 2.0;
        for (id, _) in &scored[start..end] {
            ranks.insert(*id, mid);
        }
        start = end;
    }
    Ok(RankTable {
        prompt_id: table.prompt_id.clone(),
        model_id: table.model_id.clone(),
        scope: if subset.is_some() { RankScope::Subset } else { RankScope::FullVocab },
        n: ranks.len(),
        ranks,
    })
}

/// Median of a non-empty slice; mean of the two central values for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    })
}

/// Lexicon word → token ids of its surface variants in one table.
pub type WordIds = BTreeMap<String, Vec<u32>>;

/// Rank of every resolvable word of `construct`, as the mean rank over its ids.
pub fn construct_word_ranks(rt: &RankTable, lexicon: &Lexicon, construct: &str, word_ids: &WordIds) -> Vec<f64> {
    lexicon
        .words_of(construct)
        .filter_map(|word| {
            let ranked: Vec<f64> = word_ids.get(word)?.iter().filter_map(|id| rt.rank(*id)).collect();
            (!ranked.is_empty()).then(|| ranked.iter().sum::<f64>() / ranked.len() as f64)
        })
        .collect()
}

/// Median rank over the resolvable words of `construct`.
pub fn median_construct_rank(rt: &RankTable, lexicon: &Lexicon, construct: &str, word_ids: &WordIds) -> Result<f64> {
    median(&construct_word_ranks(rt, lexicon, construct, word_ids))
        .ok_or_else(|| Error::MissingConstruct(construct.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_dictionary, unroll, CompletionList};
    use crate::scoretable::ScoreKind;

    fn table(scores: &[f64]) -> ScoreTable {
        let mut t = ScoreTable::new("m", "tok", "p", ScoreKind::Reward);
        for (i, s) in scores.iter().enumerate() {
            t.insert(i as u32, format!("w{i}"), *s).unwrap();
        }
        t
    }

    fn rank_vec(scores: &[f64]) -> Vec<f64> {
        ranks(&table(scores), None).unwrap().ranks.into_values().collect()
    }

    #[test]
    fn mid_ranks() {
        assert_eq!(rank_vec(&[0.9, 0.1, 0.5, 0.5]), vec![1.0, 4.0, 2.5, 2.5]);
        assert_eq!(rank_vec(&[3.0, 2.0, 1.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(rank_vec(&[7.0, 7.0, 7.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn subset_scope() {
        let t = table(&[0.9, 0.1, 0.5, 0.5]);
        let rt = ranks(&t, Some(&BTreeSet::from([1, 3]))).unwrap();
        assert_eq!(rt.scope, RankScope::Subset);
        assert_eq!(rt.rank(3), Some(1.0));
        assert_eq!(rt.rank(1), Some(2.0));
        assert!(ranks(&t, Some(&BTreeSet::new())).is_err());
        assert!(ranks(&t, Some(&BTreeSet::from([9]))).is_err());
        assert!(matches!(ranks(&table(&[]), None), Err(Error::Domain(_))));
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[2.0, 5.0]), Some(3.5));
        assert_eq!(median(&[7.0]), Some(7.0));
        assert_eq!(median(&[9.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn construct_median_over_word_ranks() {
        let lex = unroll(
            "big2",
            &parse_dictionary("love communion\nhelp communion\nwin agency\n").unwrap(),
            &CompletionList::default(),
        )
        .unwrap();
        // ids: 0 love, 1 " love", 2 help, 3 win
        let t = table(&[4.0, 2.0, 3.0, 1.0]);
        let rt = ranks(&t, None).unwrap();
        let ids: WordIds = [("love", vec![0, 1]), ("help", vec![2]), ("win", vec![3])]
            .into_iter()
            .map(|(w, v)| (w.to_string(), v))
            .collect();
        // love = mean(1, 3) = 2, help = 2
        assert_eq!(median_construct_rank(&rt, &lex, "communion", &ids).unwrap(), 2.0);
        assert_eq!(median_construct_rank(&rt, &lex, "agency", &ids).unwrap(), 4.0);
        let empty = WordIds::new();
        assert!(matches!(
            median_construct_rank(&rt, &lex, "agency", &empty),
            Err(Error::MissingConstruct(_))
        ));
    }
}
