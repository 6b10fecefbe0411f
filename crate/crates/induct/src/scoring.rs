//! Output normalization and the per-task string metrics.
//!
//! Every metric normalizes the model output the same way first: keep only
//! the first generated sentence and lowercase it. The eight metric kinds
//! below are the complete scoring suite; each task maps to exactly one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::taskgen::{Demonstration, TaskId};

/// The closed set of task metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    ExactMatch,
    ExactSetMatch,
    ContainsGold,
    InGoldSet,
    UnigramF1,
    RhymeGroup,
    SimilarityLabel,
    WicLabel,
}

impl MetricKind {
    pub const ALL: [MetricKind; 8] = [
        MetricKind::ExactMatch,
        MetricKind::ExactSetMatch,
        MetricKind::ContainsGold,
        MetricKind::InGoldSet,
        MetricKind::UnigramF1,
        MetricKind::RhymeGroup,
        MetricKind::SimilarityLabel,
        MetricKind::WicLabel,
    ];

    /// Total mapping from task to metric.
    pub fn for_task(task: TaskId) -> MetricKind {
        use TaskId::*;
        match task {
            FirstLetter | SecondLetter | ListLetters | Pluralization | Passivization | Negation
            | Antonyms | LargerAnimal | CauseSelection | Sum | Diff | NumToWord | Sentiment => {
                MetricKind::ExactMatch
            }
            StartingWith | Membership => MetricKind::ExactSetMatch,
            Synonyms => MetricKind::ContainsGold,
            TranslationDe | TranslationEs | TranslationFr => MetricKind::InGoldSet,
            CommonConcept | Formality => MetricKind::UnigramF1,
            Rhymes => MetricKind::RhymeGroup,
            SentenceSimilarity => MetricKind::SimilarityLabel,
            WordInContext => MetricKind::WicLabel,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::ExactMatch => "exact_match",
            MetricKind::ExactSetMatch => "exact_set_match",
            MetricKind::ContainsGold => "contains_gold",
            MetricKind::InGoldSet => "in_gold_set",
            MetricKind::UnigramF1 => "unigram_f1",
            MetricKind::RhymeGroup => "rhyme_group",
            MetricKind::SimilarityLabel => "similarity_label",
            MetricKind::WicLabel => "wic_label",
        }
    }
}

/// Verbal descriptors for the sentence-similarity labels 0..=5.
pub const SIMILARITY_DESCRIPTORS: [&str; 6] = [
    "definitely not",
    "probably not",
    "possibly",
    "probably",
    "almost perfectly",
    "perfectly",
];

/// Accepted outputs for the word-in-context "same meaning" label.
pub const WIC_SAME: [&str; 3] = ["same", "yes", "true"];
/// Accepted outputs for the word-in-context "different meaning" label.
pub const WIC_DIFFERENT: [&str; 3] = ["not the same", "no", "false"];

/// First generated sentence: everything up to the first newline or the
/// first sentence-final punctuation mark (., !, ?) that is followed by
/// whitespace or the end of the string. The punctuation mark itself is kept.
fn first_sentence(raw: &str) -> &str {
    let bytes = raw.as_bytes();
    for (i, c) in raw.char_indices() {
        if c == '\n' {
            return &raw[..i];
        }
        if matches!(c, '.' | '!' | '?') {
            let next = i + c.len_utf8();
            if next >= bytes.len() || raw[next..].chars().next().is_none_or(char::is_whitespace) {
                return &raw[..next];
            }
        }
    }
    raw
}

/// Normalize a raw model output for match-style comparison: first sentence,
/// lowercased, trimmed, with one trailing sentence-final punctuation mark
/// stripped.
pub fn normalize(raw: &str) -> String {
    let mut s = first_sentence(raw).trim().to_lowercase();
    if matches!(s.chars().last(), Some('.' | '!' | '?')) {
        s.pop();
        while s.ends_with(char::is_whitespace) {
            s.pop();
        }
    }
    s
}

/// Tokenize for unigram F1: first sentence, lowercased, punctuation
/// stripped, whitespace-split.
fn f1_tokens(raw: &str) -> Vec<String> {
    first_sentence(raw)
        .to_lowercase()
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c.is_whitespace() {
                c
            } else {
                ' '
            }
        })
        .collect::<String>()
        .split_whitespace()
        .map(|t| t.to_string())
        .collect()
}

/// Unigram-overlap F1 between two texts (multiset overlap). Both sides
/// empty scores 1.0; exactly one side empty scores 0.0.
pub fn unigram_f1(prediction: &str, gold: &str) -> f64 {
    let pred = f1_tokens(prediction);
    let gold = f1_tokens(gold);
    if pred.is_empty() && gold.is_empty() {
        return 1.0;
    }
    if pred.is_empty() || gold.is_empty() {
        return 0.0;
    }
    let mut counts = std::collections::HashMap::new();
    for t in &gold {
        *counts.entry(t.as_str()).or_insert(0usize) += 1;
    }
    let mut overlap = 0usize;
    for t in &pred {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    if overlap == 0 {
        return 0.0;
    }
    let precision = overlap as f64 / pred.len() as f64;
    let recall = overlap as f64 / gold.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Split a normalized answer into its comma-separated item set.
fn comma_set(normalized: &str) -> std::collections::BTreeSet<String> {
    normalized
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Tokens of a normalized answer when split on whitespace and commas.
fn answer_tokens(normalized: &str) -> Vec<String> {
    normalized
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.to_string())
        .collect()
}

/// Accepted surface forms for a similarity gold label: the numerical label,
/// the verbal label, and the combined "n - descriptor" form.
fn similarity_accepted(gold_norm: &str) -> Vec<String> {
    if let Some((num, desc)) = gold_norm.split_once(" - ") {
        vec![
            gold_norm.to_string(),
            num.trim().to_string(),
            desc.trim().to_string(),
        ]
    } else {
        vec![gold_norm.to_string()]
    }
}

/// Accepted surface forms for a word-in-context gold label.
fn wic_accepted(gold_norm: &str) -> Vec<String> {
    if WIC_SAME.contains(&gold_norm) {
        WIC_SAME.iter().map(|s| s.to_string()).collect()
    } else if WIC_DIFFERENT.contains(&gold_norm) {
        WIC_DIFFERENT.iter().map(|s| s.to_string()).collect()
    } else {
        vec![gold_norm.to_string()]
    }
}

/// Score a raw prediction against a demonstration's gold outputs.
/// Always in [0, 1]; an empty prediction scores 0 and never errors.
pub fn score(kind: MetricKind, prediction: &str, gold: &Demonstration) -> f64 {
    score_outputs(kind, prediction, &gold.gold)
}

/// [`score`] against a bare gold-output list (used when replaying
/// persisted runs, where only the gold strings survive).
pub fn score_outputs(kind: MetricKind, prediction: &str, gold_outputs: &[String]) -> f64 {
    let pred_norm = normalize(prediction);
    let golds_norm: Vec<String> = gold_outputs.iter().map(|g| normalize(g)).collect();
    match kind {
        MetricKind::ExactMatch => {
            bool_score(!pred_norm.is_empty() && golds_norm.contains(&pred_norm))
        }
        MetricKind::ExactSetMatch => {
            let pred_set = comma_set(&pred_norm);
            bool_score(!pred_set.is_empty() && golds_norm.iter().any(|g| comma_set(g) == pred_set))
        }
        MetricKind::ContainsGold => {
            let tokens = answer_tokens(&pred_norm);
            bool_score(
                golds_norm
                    .iter()
                    .any(|g| !g.is_empty() && tokens.iter().any(|t| t == g)),
            )
        }
        MetricKind::InGoldSet | MetricKind::RhymeGroup => {
            bool_score(!pred_norm.is_empty() && golds_norm.contains(&pred_norm))
        }
        MetricKind::UnigramF1 => gold_outputs
            .iter()
            .map(|g| unigram_f1(prediction, g))
            .fold(0.0, f64::max),
        MetricKind::SimilarityLabel => bool_score(
            !pred_norm.is_empty()
                && golds_norm
                    .iter()
                    .any(|g| similarity_accepted(g).contains(&pred_norm)),
        ),
        MetricKind::WicLabel => bool_score(
            !pred_norm.is_empty()
                && golds_norm
                    .iter()
                    .any(|g| wic_accepted(g).contains(&pred_norm)),
        ),
    }
}

fn bool_score(hit: bool) -> f64 {
    if hit {
        1.0
    } else {
        0.0
    }
}

/// Parse a metric name as used in run records and CLI flags.
pub fn parse_metric(name: &str) -> Result<MetricKind> {
    MetricKind::ALL
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown metric kind '{name}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo(input: &str, golds: &[&str]) -> Demonstration {
        Demonstration::new(input, golds.iter().map(|g| g.to_string()).collect()).unwrap()
    }

    #[test]
    fn normalize_takes_first_sentence_and_lowercases() {
        assert_eq!(normalize("Cats. They are great."), "cats");
        assert_eq!(normalize("cats"), "cats");
        assert_eq!(normalize(" Thirty-two\nInput: next"), "thirty-two");
        assert_eq!(normalize("3.5 stars"), "3.5 stars");
        assert_eq!(normalize(""), "");
        assert_eq!(normalize("  Word!  "), "word");
    }

    #[test]
    fn exact_match_is_reflexive_after_normalization() {
        for g in ["cats", "The scientist was introduced.", "32"] {
            assert_eq!(score(MetricKind::ExactMatch, g, &demo("x", &[g])), 1.0);
        }
        assert_eq!(
            score(MetricKind::ExactMatch, "Cats.", &demo("cat", &["cats"])),
            1.0
        );
        assert_eq!(
            score(MetricKind::ExactMatch, "cat", &demo("cat", &["cats"])),
            0.0
        );
    }

    #[test]
    fn set_match_ignores_order() {
        let d = demo("sentence [m]", &["me, man"]);
        assert_eq!(score(MetricKind::ExactSetMatch, "man, me", &d), 1.0);
        assert_eq!(score(MetricKind::ExactSetMatch, "Man,   me.", &d), 1.0);
        assert_eq!(score(MetricKind::ExactSetMatch, "man", &d), 0.0);
        assert_eq!(score(MetricKind::ExactSetMatch, "man, me, most", &d), 0.0);
    }

    #[test]
    fn contains_gold_accepts_token_membership() {
        let d = demo("alleged", &["supposed"]);
        assert_eq!(
            score(MetricKind::ContainsGold, "supposed, assumed", &d),
            1.0
        );
        assert_eq!(
            score(MetricKind::ContainsGold, "assumed or supposed", &d),
            1.0
        );
        assert_eq!(score(MetricKind::ContainsGold, "presupposed", &d), 0.0);
    }

    #[test]
    fn in_gold_set_checks_any_gold() {
        let d = demo("game", &["juego", "partido"]);
        assert_eq!(score(MetricKind::InGoldSet, "Partido", &d), 1.0);
        assert_eq!(score(MetricKind::InGoldSet, "jeu", &d), 0.0);
    }

    #[test]
    fn unigram_f1_worked_example() {
        // P = 2/4, R = 2/2, F1 = 2 * 0.5 * 1.0 / 1.5.
        let d = demo("guitars, pendulums, neutrinos", &["involve oscillations"]);
        let s = score(MetricKind::UnigramF1, "they all involve oscillations", &d);
        assert!((s - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            score(MetricKind::UnigramF1, "involve oscillations", &d),
            1.0
        );
        assert_eq!(score(MetricKind::UnigramF1, "rotate quickly", &d), 0.0);
    }

    #[test]
    fn similarity_label_accepts_three_forms() {
        let d = demo("Sentence 1: a Sentence 2: b", &["5 - perfectly"]);
        for pred in ["5 - perfectly", "perfectly", "5", "5 - Perfectly."] {
            assert_eq!(
                score(MetricKind::SimilarityLabel, pred, &d),
                1.0,
                "pred {pred:?}"
            );
        }
        assert_eq!(score(MetricKind::SimilarityLabel, "4", &d), 0.0);
    }

    #[test]
    fn wic_label_accepts_equivalents() {
        let same = demo("x", &["same"]);
        let diff = demo("x", &["not the same"]);
        for pred in ["same", "Yes", "TRUE."] {
            assert_eq!(score(MetricKind::WicLabel, pred, &same), 1.0);
            assert_eq!(score(MetricKind::WicLabel, pred, &diff), 0.0);
        }
        for pred in ["not the same", "no", "False"] {
            assert_eq!(score(MetricKind::WicLabel, pred, &diff), 1.0);
            assert_eq!(score(MetricKind::WicLabel, pred, &same), 0.0);
        }
    }

    #[test]
    fn empty_prediction_scores_zero_everywhere() {
        let d = demo("x", &["y"]);
        for kind in MetricKind::ALL {
            assert_eq!(score(kind, "", &d), 0.0, "{kind:?}");
        }
    }

    #[test]
    fn metric_mapping_is_total() {
        for task in TaskId::ALL {
            let _ = MetricKind::for_task(task);
        }
        assert_eq!(
            MetricKind::for_task(TaskId::Synonyms),
            MetricKind::ContainsGold
        );
        assert_eq!(MetricKind::for_task(TaskId::Rhymes), MetricKind::RhymeGroup);
        assert_eq!(
            MetricKind::for_task(TaskId::Membership),
            MetricKind::ExactSetMatch
        );
    }
}
