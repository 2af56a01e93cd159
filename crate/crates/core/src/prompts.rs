//! The 54 value-laden "one word" prompts.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Valence {
    Positive,
    Negative,
}

impl Valence {
    pub fn adjectives(self) -> [&'static str; 3] {
        match self {
            Valence::Positive => ["best", "greatest", "most good"],
            Valence::Negative => ["worst", "most bad", "most terrible"],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Valence::Positive => "positive",
            Valence::Negative => "negative",
        }
    }
}

pub const SUPERLATIVES: [&str; 3] = ["ever", "in the world", "of all time"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Template {
    /// "What, in one word, is the ... ?"
    InlineOneWord,
    /// "What, in a single word, is the ... ?"
    InlineSingleWord,
    /// "What is the ... ? Please answer in one word only."
    TrailingInstruction,
}

impl Template {
    pub const ALL: [Template; 3] = [
        Template::InlineOneWord,
        Template::InlineSingleWord,
        Template::TrailingInstruction,
    ];

    pub fn render(self, adjective: &str, superlative: &str) -> String {
        match self {
            Template::InlineOneWord => format!("What, in one word, is the {adjective} thing {superlative}?"),
            Template::InlineSingleWord => format!("What, in a single word, is the {adjective} thing {superlative}?"),
            Template::TrailingInstruction => {
                format!("What is the {adjective} thing {superlative}? Please answer in one word only.")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    /// `<valence>-<adjective><superlative><template>`, 1-based indices.
    pub id: String,
    pub text: String,
    pub valence: Valence,
    pub adjective: String,
    pub superlative: String,
    pub template: Template,
}

/// Which valences to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValenceFilter {
    Positive,
    Negative,
    All,
}

fn for_valence(valence: Valence) -> impl Iterator<Item = PromptSpec> {
    valence.adjectives().into_iter().enumerate().flat_map(move |(ai, adjective)| {
        SUPERLATIVES.into_iter().enumerate().flat_map(move |(si, superlative)| {
            Template::ALL.into_iter().enumerate().map(move |(ti, template)| PromptSpec {
                id: format!("{}-{}{}{}", valence.as_str(), ai + 1, si + 1, ti + 1),
                text: template.render(adjective, superlative),
                valence,
                adjective: adjective.to_string(),
                superlative: superlative.to_string(),
                template,
            })
        })
    })
}

/// Prompts in listing order: positives first, then by adjective, superlative and template.
pub fn generate_prompts(filter: ValenceFilter) -> Vec<PromptSpec> {
    let valences: &[Valence] = match filter {
        ValenceFilter::Positive => &[Valence::Positive],
        ValenceFilter::Negative => &[Valence::Negative],
        ValenceFilter::All => &[Valence::Positive, Valence::Negative],
    };
    valences.iter().flat_map(|v| for_valence(*v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts_and_first_prompt() {
        let all = generate_prompts(ValenceFilter::All);
        assert_eq!(all.len(), 54);
        assert_eq!(all[0].text, "What, in one word, is the best thing ever?");
        assert_eq!(all[0].id, "positive-111");
        assert_eq!(generate_prompts(ValenceFilter::Positive).len(), 27);
    }

    #[test]
    fn negative_set_contains_trailing_instruction() {
        let neg = generate_prompts(ValenceFilter::Negative);
        assert_eq!(neg.len(), 27);
        assert!(neg
            .iter()
            .any(|p| p.text == "What is the most terrible thing of all time? Please answer in one word only."));
    }

    #[test]
    fn valences_are_disjoint() {
        let pos: HashSet<String> = generate_prompts(ValenceFilter::Positive).into_iter().map(|p| p.text).collect();
        let neg: HashSet<String> = generate_prompts(ValenceFilter::Negative).into_iter().map(|p| p.text).collect();
        assert!(pos.is_disjoint(&neg));
    }

    #[test]
    fn each_prompt_has_one_adjective_and_superlative() {
        for p in generate_prompts(ValenceFilter::All) {
            let adj = p.valence.adjectives();
            let hits = adj.iter().filter(|a| p.text.contains(&format!("the {a} thing"))).count();
            assert_eq!(hits, 1, "{}", p.text);
            assert_eq!(SUPERLATIVES.iter().filter(|s| p.text.contains(&format!("thing {s}?"))).count(), 1);
        }
    }
}
