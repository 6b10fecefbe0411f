//! Invariant scan over all 24 fixture-generated task datasets.

mod common;

use std::collections::HashSet;

use induct::corpus::pluralize;
use induct::taskgen::{generate_task, number_to_words, Demonstration, TaskDataset, TaskId};

use common::fixture_manifest;

fn dataset(task: TaskId) -> TaskDataset {
    generate_task(task, &fixture_manifest(), 11).unwrap_or_else(|e| panic!("{task}: {e}"))
}

fn all_demos(ds: &TaskDataset) -> impl Iterator<Item = &Demonstration> {
    ds.induce.iter().chain(&ds.execute)
}

#[test]
fn every_task_generates_with_split_hygiene() {
    for task in TaskId::ALL {
        let ds = dataset(task);
        assert!(
            !ds.induce.is_empty() && !ds.execute.is_empty(),
            "{task}: empty split"
        );
        let induce: HashSet<&str> = ds.induce.iter().map(|d| d.input.as_str()).collect();
        for d in &ds.execute {
            assert!(
                !induce.contains(d.input.as_str()),
                "{task}: '{}' in both splits",
                d.input
            );
        }
        for d in all_demos(&ds) {
            assert!(!d.input.is_empty(), "{task}: empty input");
            assert!(
                !d.gold.is_empty() && d.gold.iter().all(|g| !g.is_empty()),
                "{task}: empty gold"
            );
        }
    }
}

/// The deterministic tasks are recomputed demonstration-by-demonstration
/// with brute-force rules.
#[test]
fn deterministic_tasks_agree_with_brute_force() {
    let first = dataset(TaskId::FirstLetter);
    for d in all_demos(&first) {
        assert_eq!(d.gold[0], d.input.chars().next().unwrap().to_string());
    }
    let second = dataset(TaskId::SecondLetter);
    for d in all_demos(&second) {
        assert_eq!(d.gold[0], d.input.chars().nth(1).unwrap().to_string());
    }
    let letters = dataset(TaskId::ListLetters);
    for d in all_demos(&letters) {
        let expected: Vec<String> = d.input.chars().map(|c| c.to_string()).collect();
        assert_eq!(d.gold[0], expected.join(" "));
        // A spaced listing reads back to the word.
        assert_eq!(d.gold[0].split(' ').collect::<String>(), d.input);
    }
    let sum = dataset(TaskId::Sum);
    for d in all_demos(&sum) {
        let nums: Vec<i64> = d.input.split(' ').map(|n| n.parse().unwrap()).collect();
        assert_eq!(d.gold[0], (nums[0] + nums[1]).to_string());
    }
    let diff = dataset(TaskId::Diff);
    for d in all_demos(&diff) {
        let nums: Vec<i64> = d.input.split(' ').map(|n| n.parse().unwrap()).collect();
        assert!(nums[0] >= nums[1]);
        let result = nums[0] - nums[1];
        assert!(result >= 0);
        assert_eq!(d.gold[0], result.to_string());
    }
    let ntw = dataset(TaskId::NumToWord);
    for d in all_demos(&ntw) {
        assert_eq!(d.gold[0], number_to_words(d.input.parse().unwrap()));
    }
    let plural = dataset(TaskId::Pluralization);
    for d in all_demos(&plural) {
        assert_eq!(d.gold[0], pluralize(&d.input));
    }
}

#[test]
fn cardinalities_match_construction_rules() {
    let sum = dataset(TaskId::Sum);
    assert_eq!(sum.induce.len() + sum.execute.len(), 10_000);
    let diff = dataset(TaskId::Diff);
    assert_eq!(diff.induce.len() + diff.execute.len(), 19_900);
    let ntw = dataset(TaskId::NumToWord);
    assert_eq!(ntw.induce.len() + ntw.execute.len(), 10_000);
    for ds in [&sum, &diff, &ntw] {
        assert_eq!(ds.execute.len(), 100, "{}: execute target", ds.task);
    }

    // Membership inherits the sampled-combination counts.
    let membership = dataset(TaskId::Membership);
    assert_eq!(membership.induce.len(), 3000);
    assert_eq!(membership.execute.len(), 100);

    // Cause selection doubles the held-out half.
    let cause = dataset(TaskId::CauseSelection);
    assert_eq!(cause.execute.len(), cause.induce.len() * 2);

    // Formality splits its pairs in half.
    let formality = dataset(TaskId::Formality);
    assert_eq!(formality.induce.len(), 15);
    assert_eq!(formality.execute.len(), 15);
}

#[test]
fn starting_with_golds_start_with_the_bracketed_letter() {
    let ds = dataset(TaskId::StartingWith);
    for d in all_demos(&ds) {
        let letter = d
            .aux
            .get("letter")
            .expect("letter aux")
            .chars()
            .next()
            .unwrap();
        let (sentence, bracket) = d.input.rsplit_once(" [").unwrap();
        assert_eq!(bracket, format!("{letter}]"));
        assert!(!sentence.is_empty());
        let words: Vec<&str> = d.gold[0].split(", ").collect();
        assert!(!words.is_empty(), "gold set must be non-empty");
        for w in words {
            assert!(
                w.to_lowercase().starts_with(letter),
                "'{w}' does not start with '{letter}' in {}",
                d.input
            );
        }
    }
}

#[test]
fn membership_lists_obey_length_and_gold_rules() {
    let manifest = fixture_manifest();
    let (path, text) = manifest.read("cefr_lexicon").unwrap();
    let lexicon = induct::corpus::Lexicon::parse(&text, &path).unwrap();
    let animals: HashSet<String> = lexicon
        .words_in_category(induct::corpus::Category::Animals)
        .into_iter()
        .collect();

    let ds = dataset(TaskId::Membership);
    for d in all_demos(&ds) {
        let items: Vec<&str> = d.input.split(", ").collect();
        assert!(
            (5..=7).contains(&items.len()),
            "list length {}",
            items.len()
        );
        let expected: Vec<&str> = items
            .iter()
            .filter(|w| animals.contains(**w))
            .copied()
            .collect();
        assert!(
            (3..=4).contains(&expected.len()),
            "animal count {}",
            expected.len()
        );
        assert_eq!(
            d.gold[0],
            expected.join(", "),
            "gold must be exactly the animal members"
        );
    }
}

#[test]
fn rhymes_golds_are_the_other_group_members() {
    let ds = dataset(TaskId::Rhymes);
    for d in all_demos(&ds) {
        assert!(d.aux.contains_key("group"));
        assert!(!d.gold.contains(&d.input), "input is not its own rhyme");
    }
    // Group ids are consistent: same group => same gold set plus input.
    for d in all_demos(&ds) {
        let mut family: Vec<&str> = d.gold.iter().map(|g| g.as_str()).collect();
        family.push(&d.input);
        family.sort();
        for other in all_demos(&ds) {
            if other.aux["group"] == d.aux["group"] {
                let mut other_family: Vec<&str> = other.gold.iter().map(|g| g.as_str()).collect();
                other_family.push(&other.input);
                other_family.sort();
                assert_eq!(family, other_family);
            }
        }
    }
}

#[test]
fn antonyms_respect_the_wordnet_verification() {
    let manifest = fixture_manifest();
    let ds = dataset(TaskId::Antonyms);
    let (path, text) = manifest.read("wordnet_antonyms").unwrap();
    let wordnet: HashSet<(String, String)> = induct::corpus::parse_tsv_rows(&text, &path, 2)
        .unwrap()
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone()))
        .collect();
    for d in all_demos(&ds) {
        let verified = d.gold.iter().any(|g| {
            wordnet.contains(&(d.input.clone(), g.clone()))
                || wordnet.contains(&(g.clone(), d.input.clone()))
        });
        assert!(verified, "unverified pair {} -> {:?}", d.input, d.gold);
    }
    // The four deliberately unlisted pairs are filtered out.
    for d in all_demos(&ds) {
        assert_ne!(d.input, "smooth");
        assert_ne!(d.input, "brave");
    }
}

#[test]
fn synonyms_carry_merged_gold_sets() {
    let ds = dataset(TaskId::Synonyms);
    let big = all_demos(&ds)
        .find(|d| d.input == "big")
        .expect("'big' present");
    assert_eq!(big.gold, vec!["large".to_string(), "huge".to_string()]);
}

#[test]
fn labeled_tasks_carry_aux_labels() {
    let sentiment = dataset(TaskId::Sentiment);
    for d in all_demos(&sentiment) {
        assert!(d.input.split_whitespace().count() <= 10, "length filter");
        assert!(matches!(d.gold[0].as_str(), "positive" | "negative"));
        assert_eq!(d.aux["label"], d.gold[0]);
    }

    let similarity = dataset(TaskId::SentenceSimilarity);
    for d in all_demos(&similarity) {
        let (n, descriptor) = d.gold[0].split_once(" - ").expect("combined label");
        let score: usize = n.parse().unwrap();
        assert!(score <= 5);
        assert_eq!(
            descriptor,
            induct::scoring::SIMILARITY_DESCRIPTORS[score],
            "descriptor for {score}"
        );
        assert_eq!(d.aux["score"], n);
        assert!(d.input.starts_with("Sentence 1: "));
        assert!(d.input.contains(" Sentence 2: "));
    }

    let wic = dataset(TaskId::WordInContext);
    for d in all_demos(&wic) {
        assert!(matches!(d.gold[0].as_str(), "same" | "not the same"));
        assert!(d.input.starts_with("Sentence 1: "));
        assert!(d.input.contains(" Word: "));
    }
}

#[test]
fn larger_animal_answer_is_one_of_the_pair() {
    let ds = dataset(TaskId::LargerAnimal);
    for d in all_demos(&ds) {
        let (a, b) = d.input.split_once(", ").unwrap();
        assert!(d.gold[0] == a || d.gold[0] == b);
    }
}

#[test]
fn cause_selection_execute_presents_both_orderings() {
    let ds = dataset(TaskId::CauseSelection);
    for d in all_demos(&ds) {
        assert!(d.input.starts_with("Sentence 1: "));
        // The gold cause is one of the two presented sentences.
        let body = d.input.strip_prefix("Sentence 1: ").unwrap();
        let (s1, s2) = body.split_once(" Sentence 2: ").unwrap();
        assert!(d.gold[0] == s1 || d.gold[0] == s2);
        let position = &d.aux["cause_position"];
        assert_eq!(position == "1", d.gold[0] == s1);
    }
    // Each execute pair appears in both orders.
    let execute_inputs: HashSet<&str> = ds.execute.iter().map(|d| d.input.as_str()).collect();
    for d in &ds.execute {
        let body = d.input.strip_prefix("Sentence 1: ").unwrap();
        let (s1, s2) = body.split_once(" Sentence 2: ").unwrap();
        let flipped = format!("Sentence 1: {s2} Sentence 2: {s1}");
        assert!(
            execute_inputs.contains(flipped.as_str()),
            "missing flipped order of {}",
            d.input
        );
    }
}

#[test]
fn common_concept_strips_task_markers() {
    let ds = dataset(TaskId::CommonConcept);
    for d in all_demos(&ds) {
        assert!(
            !d.gold[0].to_lowercase().starts_with("they all"),
            "marker left in '{}'",
            d.gold[0]
        );
    }
}

#[test]
fn translations_use_full_gold_sets() {
    let ds = dataset(TaskId::TranslationEs);
    let glass = all_demos(&ds)
        .find(|d| d.input == "glass")
        .expect("'glass' present");
    assert_eq!(glass.gold, vec!["vaso".to_string(), "copa".to_string()]);
}
