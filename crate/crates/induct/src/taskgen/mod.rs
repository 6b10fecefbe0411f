//! Task dataset construction: the 24 tasks, their induce/execute splits,
//! and constrained induction-example sampling.

mod generate;
mod io;
mod numwords;
mod sample;

pub(crate) use generate::subrng;
pub use generate::{generate_task, CEN_MIN_LEN, CEN_TOP_K, PLURAL_MIN_FREQ};
pub use io::{export_dataset, import_dataset};
pub use numwords::number_to_words;
pub use sample::sample_induction_examples;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The 24 benchmark tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskId {
    FirstLetter,
    SecondLetter,
    ListLetters,
    StartingWith,
    Pluralization,
    Passivization,
    Negation,
    Antonyms,
    Synonyms,
    Membership,
    Rhymes,
    LargerAnimal,
    CauseSelection,
    CommonConcept,
    Formality,
    Sum,
    Diff,
    NumToWord,
    TranslationDe,
    TranslationEs,
    TranslationFr,
    Sentiment,
    SentenceSimilarity,
    WordInContext,
}

impl TaskId {
    pub const ALL: [TaskId; 24] = [
        TaskId::FirstLetter,
        TaskId::SecondLetter,
        TaskId::ListLetters,
        TaskId::StartingWith,
        TaskId::Pluralization,
        TaskId::Passivization,
        TaskId::Negation,
        TaskId::Antonyms,
        TaskId::Synonyms,
        TaskId::Membership,
        TaskId::Rhymes,
        TaskId::LargerAnimal,
        TaskId::CauseSelection,
        TaskId::CommonConcept,
        TaskId::Formality,
        TaskId::Sum,
        TaskId::Diff,
        TaskId::NumToWord,
        TaskId::TranslationDe,
        TaskId::TranslationEs,
        TaskId::TranslationFr,
        TaskId::Sentiment,
        TaskId::SentenceSimilarity,
        TaskId::WordInContext,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TaskId::FirstLetter => "first_letter",
            TaskId::SecondLetter => "second_letter",
            TaskId::ListLetters => "list_letters",
            TaskId::StartingWith => "starting_with",
            TaskId::Pluralization => "pluralization",
            TaskId::Passivization => "passivization",
            TaskId::Negation => "negation",
            TaskId::Antonyms => "antonyms",
            TaskId::Synonyms => "synonyms",
            TaskId::Membership => "membership",
            TaskId::Rhymes => "rhymes",
            TaskId::LargerAnimal => "larger_animal",
            TaskId::CauseSelection => "cause_selection",
            TaskId::CommonConcept => "common_concept",
            TaskId::Formality => "formality",
            TaskId::Sum => "sum",
            TaskId::Diff => "diff",
            TaskId::NumToWord => "num_to_word",
            TaskId::TranslationDe => "translation_de",
            TaskId::TranslationEs => "translation_es",
            TaskId::TranslationFr => "translation_fr",
            TaskId::Sentiment => "sentiment",
            TaskId::SentenceSimilarity => "sentence_similarity",
            TaskId::WordInContext => "word_in_context",
        }
    }

    /// Manifest source ids this task's generator reads.
    pub fn required_sources(&self) -> &'static [&'static str] {
        match self {
            TaskId::FirstLetter | TaskId::SecondLetter | TaskId::ListLetters => {
                &["freq_table", "nouns"]
            }
            TaskId::StartingWith => &["cola_train", "cola_dev_in", "cola_dev_out"],
            TaskId::Pluralization => &["freq_table", "nouns", "mass_nouns"],
            TaskId::Passivization => &["hans_pairs"],
            TaskId::Negation => &[
                "neg_squad",
                "neg_conceptnet",
                "neg_trex",
                "neg_google_re_birth",
                "neg_google_re_death",
            ],
            TaskId::Antonyms => &["olmpics_antonyms", "wordnet_antonyms"],
            TaskId::Synonyms => &["olmpics_synonyms"],
            TaskId::Membership => &["cefr_lexicon"],
            TaskId::Rhymes => &["cefr_lexicon", "pron_dict"],
            TaskId::LargerAnimal => &["olmpics_comparison"],
            TaskId::CauseSelection => &["bigbench_cause_effect"],
            TaskId::CommonConcept => &["bigbench_common_concept"],
            TaskId::Formality => &["formality_pairs"],
            TaskId::Sum | TaskId::Diff | TaskId::NumToWord => &[],
            TaskId::TranslationDe => &["freq_table", "nouns", "wiktionary_de"],
            TaskId::TranslationEs => &["freq_table", "nouns", "wiktionary_es"],
            TaskId::TranslationFr => &["freq_table", "nouns", "wiktionary_fr"],
            TaskId::Sentiment => &["sst_train", "sst_dev"],
            TaskId::SentenceSimilarity => &["stsb_train", "stsb_dev"],
            TaskId::WordInContext => &["wic_train", "wic_dev"],
        }
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskId {
    type Err = Error;

    fn from_str(s: &str) -> Result<TaskId> {
        TaskId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| {
                let valid: Vec<&str> = TaskId::ALL.iter().map(|t| t.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown task '{s}' (valid tasks: {})",
                    valid.join(", ")
                ))
            })
    }
}

/// One input-output pair. `gold` is a non-empty list of acceptable outputs
/// in canonical order: the first element is the surface form rendered into
/// prompts, the full list is used for scoring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demonstration {
    pub input: String,
    pub gold: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aux: BTreeMap<String, String>,
}

impl Demonstration {
    pub fn new(input: impl Into<String>, gold: Vec<String>) -> Result<Demonstration> {
        let input = input.into();
        if input.is_empty() {
            return Err(Error::InvalidArgument(
                "demonstration input is empty".into(),
            ));
        }
        if gold.is_empty() || gold.iter().any(String::is_empty) {
            return Err(Error::InvalidArgument(format!(
                "demonstration '{input}' has an empty gold output"
            )));
        }
        Ok(Demonstration {
            input,
            gold,
            aux: BTreeMap::new(),
        })
    }

    pub fn with_aux(mut self, key: &str, value: impl Into<String>) -> Demonstration {
        self.aux.insert(key.to_string(), value.into());
        self
    }

    /// The surface form rendered into prompts.
    pub fn primary_gold(&self) -> &str {
        &self.gold[0]
    }
}

/// A task's demonstration pools. Induce feeds instruction induction,
/// execute is held out for execution accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDataset {
    pub task: TaskId,
    pub induce: Vec<Demonstration>,
    pub execute: Vec<Demonstration>,
    pub seed: u64,
}

impl TaskDataset {
    /// Assemble and validate a dataset. Execute demonstrations whose input
    /// also appears in the induce pool are dropped (split hygiene holds for
    /// arbitrary user-supplied sources); inputs must be unique within each
    /// split.
    pub fn new(
        task: TaskId,
        induce: Vec<Demonstration>,
        execute: Vec<Demonstration>,
        seed: u64,
    ) -> Result<TaskDataset> {
        let induce_inputs: HashSet<&str> = induce.iter().map(|d| d.input.as_str()).collect();
        if induce_inputs.len() != induce.len() {
            return Err(Error::InvalidArgument(format!(
                "{task}: duplicate inputs in the induce split"
            )));
        }
        let execute: Vec<Demonstration> = execute
            .into_iter()
            .filter(|d| !induce_inputs.contains(d.input.as_str()))
            .collect();
        let mut seen = HashSet::new();
        for d in &execute {
            if !seen.insert(d.input.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "{task}: duplicate input '{}' in the execute split",
                    d.input
                )));
            }
        }
        if induce.is_empty() || execute.is_empty() {
            return Err(Error::Unsatisfiable(format!(
                "{task}: empty {} split",
                if induce.is_empty() {
                    "induce"
                } else {
                    "execute"
                }
            )));
        }
        Ok(TaskDataset {
            task,
            induce,
            execute,
            seed,
        })
    }
}

/// Derivation record of a sampled induction example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPath {
    pub seed: u64,
    pub index: u64,
}

/// Five demonstrations plus where they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InductionExample {
    pub task: TaskId,
    pub demos: Vec<Demonstration>,
    pub seed_path: SeedPath,
}
