//! The per-task dataset generators.
//!
//! Every generator is a deterministic function of (task, manifest contents,
//! seed): all randomness flows through ChaCha streams keyed on the seed and
//! a per-purpose label, so rebuilding from identical sources is
//! byte-identical across runs and platforms.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::corpus::{
    build_cen, build_rhyme_groups, parse_jsonl, parse_tsv_rows, parse_word_list, pluralize,
    Category, CefrLevel, FrequencyTable, Lang, Lexicon, NounRecord, PronDict, SourceManifest,
    TranslationLexicon,
};
use crate::error::{Error, Result};
use crate::taskgen::{number_to_words, Demonstration, TaskDataset, TaskId};

/// Frequency cut used to derive the common-noun list.
pub const CEN_TOP_K: usize = 10_000;
/// Minimum word length for common nouns.
pub const CEN_MIN_LEN: usize = 3;
/// A derived plural is kept only if the corpus saw it at least this often.
pub const PLURAL_MIN_FREQ: u64 = 50;
/// Execute-split size unless a task's construction says otherwise.
const EXECUTE_TARGET: usize = 100;

/// Deterministic per-purpose RNG: the stream is keyed on both the seed and
/// a label so independent sampling steps never share a stream.
pub(crate) fn subrng(seed: u64, label: &str) -> ChaCha20Rng {
    let mut hasher = Sha256::new();
    hasher.update(label.as_bytes());
    hasher.update(seed.to_le_bytes());
    ChaCha20Rng::from_seed(hasher.finalize().into())
}

/// Move up to `target` items into the execute split (never more than half
/// the pool, so the induce split stays usable on small sources). Induce
/// keeps the pool's construction order; execute is in draw order.
fn split_execute(
    pool: Vec<Demonstration>,
    target: usize,
    rng: &mut ChaCha20Rng,
) -> (Vec<Demonstration>, Vec<Demonstration>) {
    let n = pool.len();
    let n_exec = target.min(n / 2).max(usize::from(n >= 2));
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(rng);
    let exec_set: HashSet<usize> = indices[..n_exec].iter().copied().collect();
    let mut pool: Vec<Option<Demonstration>> = pool.into_iter().map(Some).collect();
    let execute: Vec<Demonstration> = indices[..n_exec]
        .iter()
        .map(|&i| pool[i].take().unwrap())
        .collect();
    let induce: Vec<Demonstration> = (0..n)
        .filter(|i| !exec_set.contains(i))
        .map(|i| pool[i].take().unwrap())
        .collect();
    (induce, execute)
}

/// Draw `target` items (or all, if fewer) in a deterministic random order.
fn sample_some<T>(items: Vec<T>, target: usize, rng: &mut ChaCha20Rng) -> Vec<T> {
    let n = items.len();
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(rng);
    let mut slots: Vec<Option<T>> = items.into_iter().map(Some).collect();
    indices
        .into_iter()
        .take(target)
        .map(|i| slots[i].take().unwrap())
        .collect()
}

fn word_count(s: &str) -> usize {
    s.split_whitespace().count()
}

/// Build the 24 task datasets from manifest-pinned sources.
pub fn generate_task(task: TaskId, manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    match task {
        TaskId::FirstLetter | TaskId::SecondLetter | TaskId::ListLetters => {
            spelling(task, manifest, seed)
        }
        TaskId::StartingWith => starting_with(manifest, seed),
        TaskId::Pluralization => pluralization(manifest, seed),
        TaskId::Passivization => pair_task(TaskId::Passivization, manifest, "hans_pairs", seed),
        TaskId::Negation => negation(manifest, seed),
        TaskId::Antonyms => antonyms(manifest, seed),
        TaskId::Synonyms => synonyms(manifest, seed),
        TaskId::Membership => membership(manifest, seed),
        TaskId::Rhymes => rhymes(manifest, seed),
        TaskId::LargerAnimal => larger_animal(manifest, seed),
        TaskId::CauseSelection => cause_selection(manifest, seed),
        TaskId::CommonConcept => common_concept(manifest, seed),
        TaskId::Formality => formality(manifest, seed),
        TaskId::Sum => sum(seed),
        TaskId::Diff => diff(seed),
        TaskId::NumToWord => num_to_word(seed),
        TaskId::TranslationDe => translation(TaskId::TranslationDe, Lang::De, manifest, seed),
        TaskId::TranslationEs => translation(TaskId::TranslationEs, Lang::Es, manifest, seed),
        TaskId::TranslationFr => translation(TaskId::TranslationFr, Lang::Fr, manifest, seed),
        TaskId::Sentiment => sentiment(manifest, seed),
        TaskId::SentenceSimilarity => sentence_similarity(manifest, seed),
        TaskId::WordInContext => word_in_context(manifest, seed),
    }
}

/// Load the frequency table and derive the common-noun list.
pub fn load_cen(manifest: &SourceManifest) -> Result<(FrequencyTable, Vec<String>)> {
    let (freq_path, freq_text) = manifest.read("freq_table")?;
    let freq = FrequencyTable::parse(&freq_text, &freq_path)?;
    let (nouns_path, nouns_text) = manifest.read("nouns")?;
    let nouns = NounRecord::parse_tsv(&nouns_text, &nouns_path)?;
    let cen = build_cen(&freq, &nouns, CEN_TOP_K, CEN_MIN_LEN)?;
    Ok((freq, cen))
}

fn spelling(task: TaskId, manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    let (_, cen) = load_cen(manifest)?;
    let mut pool = Vec::with_capacity(cen.len());
    for word in cen {
        let gold = match task {
            TaskId::FirstLetter => word.chars().next().unwrap().to_string(),
            TaskId::SecondLetter => word.chars().nth(1).unwrap().to_string(),
            TaskId::ListLetters => {
                let letters: Vec<String> = word.chars().map(|c| c.to_string()).collect();
                letters.join(" ")
            }
            _ => unreachable!(),
        };
        pool.push(Demonstration::new(word, vec![gold])?);
    }
    let mut rng = subrng(seed, &format!("{}/split", task.name()));
    let (induce, execute) = split_execute(pool, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(task, induce, execute, seed)
}

#[derive(Deserialize)]
struct SentenceRecord {
    sentence: String,
}

/// All (sentence, letter) pairs of a sentence list, one pair per letter
/// that starts at least one word. Tokens are whitespace-split with
/// surrounding punctuation trimmed.
fn sentence_letter_pairs(sentences: &[String]) -> Result<Vec<Demonstration>> {
    let mut pairs = Vec::new();
    for sentence in sentences {
        let tokens: Vec<&str> = sentence
            .split_whitespace()
            .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()))
            .filter(|t| !t.is_empty())
            .collect();
        let letters: BTreeSet<char> = tokens
            .iter()
            .filter_map(|t| t.chars().next())
            .filter(|c| c.is_alphabetic())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        for letter in letters {
            let mut seen = HashSet::new();
            let matches: Vec<&str> = tokens
                .iter()
                .filter(|t| {
                    t.chars()
                        .next()
                        .map(|c| c.to_ascii_lowercase() == letter)
                        .unwrap_or(false)
                })
                .filter(|t| seen.insert(t.to_lowercase()))
                .copied()
                .collect();
            if matches.is_empty() {
                continue;
            }
            let demo =
                Demonstration::new(format!("{sentence} [{letter}]"), vec![matches.join(", ")])?
                    .with_aux("letter", letter.to_string());
            pairs.push(demo);
        }
    }
    Ok(pairs)
}

fn read_sentences(manifest: &SourceManifest, id: &str) -> Result<Vec<String>> {
    let (path, text) = manifest.read(id)?;
    let records: Vec<SentenceRecord> = parse_jsonl(&text, &path)?;
    Ok(records.into_iter().map(|r| r.sentence).collect())
}

fn starting_with(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    let train_pairs = sentence_letter_pairs(&read_sentences(manifest, "cola_train")?)?;
    let dev_in_pairs = sentence_letter_pairs(&read_sentences(manifest, "cola_dev_in")?)?;
    let dev_out_pairs = sentence_letter_pairs(&read_sentences(manifest, "cola_dev_out")?)?;

    let mut rng = subrng(seed, "starting_with/sample");
    let induce = sample_some(train_pairs, 3000, &mut rng);
    let tag = |demos: Vec<Demonstration>, domain: &str| -> Vec<Demonstration> {
        demos
            .into_iter()
            .map(|d| d.with_aux("domain", domain))
            .collect()
    };
    let mut execute = tag(sample_some(dev_in_pairs, 50, &mut rng), "in");
    execute.extend(tag(sample_some(dev_out_pairs, 50, &mut rng), "out"));
    TaskDataset::new(TaskId::StartingWith, induce, execute, seed)
}

fn pluralization(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    let (freq, cen) = load_cen(manifest)?;
    let (_, mass_text) = manifest.read("mass_nouns")?;
    let mass: HashSet<String> = parse_word_list(&mass_text).into_iter().collect();

    let mut pool = Vec::new();
    for word in cen {
        if mass.contains(&word) {
            continue;
        }
        let plural = pluralize(&word);
        if freq.count(&plural) >= PLURAL_MIN_FREQ {
            pool.push(Demonstration::new(word, vec![plural])?);
        }
    }
    if pool.is_empty() {
        return Err(Error::EmptyResult(
            "pluralization: no plural passed the frequency filter".into(),
        ));
    }
    let mut rng = subrng(seed, "pluralization/split");
    let (induce, execute) = split_execute(pool, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(TaskId::Pluralization, induce, execute, seed)
}

/// Generic two-column task: input\toutput rows, standard split.
fn pair_task(
    task: TaskId,
    manifest: &SourceManifest,
    source: &str,
    seed: u64,
) -> Result<TaskDataset> {
    let (path, text) = manifest.read(source)?;
    let rows = parse_tsv_rows(&text, &path, 2)?;
    let mut seen = HashSet::new();
    let mut pool = Vec::new();
    for row in rows {
        if seen.insert(row[0].clone()) {
            pool.push(Demonstration::new(row[0].clone(), vec![row[1].clone()])?);
        }
    }
    let mut rng = subrng(seed, &format!("{}/split", task.name()));
    let (induce, execute) = split_execute(pool, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(task, induce, execute, seed)
}

fn negation(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    // Subset sizes follow the benchmark's construction; the two Google-RE
    // relations are sampled, the rest are fixed prefixes of the exports.
    let take_rows = |id: &str, n: usize| -> Result<Vec<Vec<String>>> {
        let (path, text) = manifest.read(id)?;
        let mut rows = parse_tsv_rows(&text, &path, 2)?;
        rows.truncate(n);
        Ok(rows)
    };
    let mut rows = take_rows("neg_squad", 304)?;
    rows.extend(take_rows("neg_conceptnet", 300)?);
    rows.extend(take_rows("neg_trex", 200)?);
    let mut rng = subrng(seed, "negation/google_re");
    for id in ["neg_google_re_birth", "neg_google_re_death"] {
        let (path, text) = manifest.read(id)?;
        let all = parse_tsv_rows(&text, &path, 2)?;
        rows.extend(sample_some(all, 100, &mut rng));
    }

    let mut seen = HashSet::new();
    let mut pool = Vec::new();
    for row in rows {
        if seen.insert(row[0].clone()) {
            pool.push(Demonstration::new(row[0].clone(), vec![row[1].clone()])?);
        }
    }
    let mut rng = subrng(seed, "negation/split");
    let (induce, execute) = split_execute(pool, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(TaskId::Negation, induce, execute, seed)
}

/// Merge rows into one demonstration per input, accumulating gold outputs
/// in first-seen order.
fn merge_by_input(rows: Vec<Vec<String>>) -> Result<Vec<Demonstration>> {
    let mut order: Vec<String> = Vec::new();
    let mut golds: HashMap<String, Vec<String>> = HashMap::new();
    for row in rows {
        let entry = golds.entry(row[0].clone()).or_insert_with(|| {
            order.push(row[0].clone());
            Vec::new()
        });
        if !entry.contains(&row[1]) {
            entry.push(row[1].clone());
        }
    }
    order
        .into_iter()
        .map(|input| {
            let gold = golds.remove(&input).unwrap();
            Demonstration::new(input, gold)
        })
        .collect()
}

fn antonyms(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    let (path, text) = manifest.read("olmpics_antonyms")?;
    let pairs = parse_tsv_rows(&text, &path, 2)?;
    let (wn_path, wn_text) = manifest.read("wordnet_antonyms")?;
    let wordnet: HashSet<(String, String)> = parse_tsv_rows(&wn_text, &wn_path, 2)?
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone()))
        .collect();

    // Antonymy is symmetric: a pair passes verification if WordNet lists it
    // in either order.
    let verified: Vec<Vec<String>> = pairs
        .into_iter()
        .filter(|r| {
            wordnet.contains(&(r[0].clone(), r[1].clone()))
                || wordnet.contains(&(r[1].clone(), r[0].clone()))
        })
        .collect();
    if verified.is_empty() {
        return Err(Error::EmptyResult(
            "antonyms: no pair passed WordNet verification".into(),
        ));
    }
    let pool = merge_by_input(verified)?;
    let mut rng = subrng(seed, "antonyms/split");
    let (induce, execute) = split_execute(pool, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(TaskId::Antonyms, induce, execute, seed)
}

fn synonyms(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    let (path, text) = manifest.read("olmpics_synonyms")?;
    let pool = merge_by_input(parse_tsv_rows(&text, &path, 2)?)?;
    let mut rng = subrng(seed, "synonyms/split");
    let (induce, execute) = split_execute(pool, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(TaskId::Synonyms, induce, execute, seed)
}

/// Per-category 80/20 word split for the membership task.
struct MembershipPools {
    animals: Vec<String>,
    others: Vec<(Category, Vec<String>)>,
}

fn membership(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    let (path, text) = manifest.read("cefr_lexicon")?;
    let full = Lexicon::parse(&text, &path)?;
    // Membership lists draw only on A1/A2-level vocabulary.
    let lexicon = Lexicon {
        items: full
            .items
            .into_iter()
            .filter(|e| matches!(e.cefr, CefrLevel::A1 | CefrLevel::A2))
            .collect(),
    };
    let mut rng = subrng(seed, "membership/word_split");

    let mut split = |category: Category| -> (Vec<String>, Vec<String>) {
        let mut words = lexicon.words_in_category(category);
        words.shuffle(&mut rng);
        let train = words.len() * 4 / 5;
        let held = words.split_off(train);
        (words, held)
    };

    let (animal_train, animal_held) = split(Category::Animals);
    let mut train_others = Vec::new();
    let mut held_others = Vec::new();
    for category in Category::OTHERS {
        let (train, held) = split(category);
        train_others.push((category, train));
        held_others.push((category, held));
    }

    let mut seen = HashSet::new();
    let mut combo_rng = subrng(seed, "membership/combos");
    let induce = membership_combos(
        &MembershipPools {
            animals: animal_train,
            others: train_others,
        },
        3000,
        &mut combo_rng,
        &mut seen,
    )?;
    let execute = membership_combos(
        &MembershipPools {
            animals: animal_held,
            others: held_others,
        },
        EXECUTE_TARGET,
        &mut combo_rng,
        &mut seen,
    )?;
    TaskDataset::new(TaskId::Membership, induce, execute, seed)
}

/// Random word lists of 5-7 words: 3-4 animals, the rest from exactly one
/// other category. Gold is the list's animal members.
fn membership_combos(
    pools: &MembershipPools,
    count: usize,
    rng: &mut ChaCha20Rng,
    seen: &mut HashSet<String>,
) -> Result<Vec<Demonstration>> {
    let usable: Vec<&(Category, Vec<String>)> =
        pools.others.iter().filter(|(_, w)| !w.is_empty()).collect();
    if pools.animals.len() < 3 || usable.is_empty() {
        return Err(Error::Unsatisfiable(
            "membership: need at least 3 animals and one non-empty other category".into(),
        ));
    }
    let mut combos = Vec::with_capacity(count);
    let mut failures = 0usize;
    while combos.len() < count {
        if failures > 1000 + count * 100 {
            // The word pools cannot produce `count` distinct lists.
            break;
        }
        let total = rng.gen_range(5..=7usize);
        let n_animals = rng
            .gen_range(3..=4usize)
            .min(total - 1)
            .min(pools.animals.len());
        if n_animals < 3 {
            failures += 1;
            continue;
        }
        let n_other = total - n_animals;
        let (category, other_pool) = usable[rng.gen_range(0..usable.len())];
        if other_pool.len() < n_other {
            failures += 1;
            continue;
        }
        let mut words: Vec<&String> = pick(&pools.animals, n_animals, rng);
        let animal_set: HashSet<&String> = words.iter().copied().collect();
        words.extend(pick(other_pool, n_other, rng));
        words.shuffle(rng);
        let input = words
            .iter()
            .map(|w| w.as_str())
            .collect::<Vec<_>>()
            .join(", ");
        if !seen.insert(input.clone()) {
            failures += 1;
            continue;
        }
        let gold: Vec<&str> = words
            .iter()
            .filter(|w| animal_set.contains(*w))
            .map(|w| w.as_str())
            .collect();
        let demo = Demonstration::new(input, vec![gold.join(", ")])?
            .with_aux("category", format!("{category:?}").to_lowercase());
        combos.push(demo);
    }
    if combos.is_empty() {
        return Err(Error::Unsatisfiable(
            "membership: could not build any word list".into(),
        ));
    }
    Ok(combos)
}

/// `k` distinct items drawn without replacement, in draw order.
fn pick<'a, T>(items: &'a [T], k: usize, rng: &mut ChaCha20Rng) -> Vec<&'a T> {
    let mut indices: Vec<usize> = (0..items.len()).collect();
    indices.shuffle(rng);
    indices.into_iter().take(k).map(|i| &items[i]).collect()
}

fn rhymes(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    let (lex_path, lex_text) = manifest.read("cefr_lexicon")?;
    let lexicon = Lexicon::parse(&lex_text, &lex_path)?;
    let eligible = lexicon.words_at_levels(&[CefrLevel::A1, CefrLevel::A2, CefrLevel::B1]);
    let filtered = Lexicon {
        items: lexicon
            .items
            .iter()
            .filter(|e| eligible.contains(&e.word))
            .cloned()
            .collect(),
    };
    let (dict_path, dict_text) = manifest.read("pron_dict")?;
    let dict = PronDict::parse(&dict_text, &dict_path)?;
    let (groups, _diag) = build_rhyme_groups(&dict, &filtered);

    let n_groups = groups.groups.len();
    if n_groups < 2 {
        return Err(Error::Unsatisfiable(format!(
            "rhymes: only {n_groups} rhyme group(s); need at least 2 to split"
        )));
    }
    // 30 execute groups as in the original construction, saturating to half
    // the available groups on small lexicons.
    let n_exec_groups = 30.min((n_groups / 2).max(1));
    let mut rng = subrng(seed, "rhymes/groups");
    let mut ids: Vec<usize> = (0..n_groups).collect();
    ids.shuffle(&mut rng);
    let exec_ids: HashSet<usize> = ids[..n_exec_groups].iter().copied().collect();

    let demo_for = |word: &str, gid: usize| -> Result<Demonstration> {
        let gold: Vec<String> = groups.groups[gid]
            .iter()
            .filter(|w| w.as_str() != word)
            .cloned()
            .collect();
        Ok(Demonstration::new(word, gold)?.with_aux("group", gid.to_string()))
    };

    let mut exec_words: Vec<(String, usize)> = Vec::new();
    for &gid in ids[..n_exec_groups].iter() {
        for word in &groups.groups[gid] {
            exec_words.push((word.clone(), gid));
        }
    }
    exec_words.sort();
    let exec_words = sample_some(exec_words, EXECUTE_TARGET, &mut rng);
    let execute: Vec<Demonstration> = exec_words
        .into_iter()
        .map(|(w, gid)| demo_for(&w, gid))
        .collect::<Result<_>>()?;

    let mut induce = Vec::new();
    for gid in 0..n_groups {
        if exec_ids.contains(&gid) {
            continue;
        }
        for word in &groups.groups[gid] {
            induce.push(demo_for(word, gid)?);
        }
    }
    TaskDataset::new(TaskId::Rhymes, induce, execute, seed)
}

fn larger_animal(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    let (path, text) = manifest.read("olmpics_comparison")?;
    let rows = parse_tsv_rows(&text, &path, 3)?;
    for (i, row) in rows.iter().enumerate() {
        if row[2] != row[0] && row[2] != row[1] {
            return Err(Error::parse(
                &path,
                i + 1,
                format!(
                    "answer '{}' is neither '{}' nor '{}'",
                    row[2], row[0], row[1]
                ),
            ));
        }
    }
    let mut vocab: Vec<String> = rows
        .iter()
        .flat_map(|r| [r[0].clone(), r[1].clone()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut rng = subrng(seed, "larger_animal/vocab");
    vocab.shuffle(&mut rng);
    let train: HashSet<String> = vocab.drain(..vocab.len() * 4 / 5).collect();
    let held: HashSet<String> = vocab.into_iter().collect();

    let make = |rows: &[Vec<String>], set: &HashSet<String>| -> Result<Vec<Demonstration>> {
        let mut seen = HashSet::new();
        rows.iter()
            .filter(|r| set.contains(&r[0]) && set.contains(&r[1]))
            .filter(|r| seen.insert(format!("{}, {}", r[0], r[1])))
            .map(|r| Demonstration::new(format!("{}, {}", r[0], r[1]), vec![r[2].clone()]))
            .collect()
    };
    let induce = make(&rows, &train)?;
    let exec_pool = make(&rows, &held)?;
    if induce.is_empty() || exec_pool.is_empty() {
        return Err(Error::Unsatisfiable(
            "larger_animal: the 80/20 animal split left a side without pairs".into(),
        ));
    }
    let execute = sample_some(exec_pool, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(TaskId::LargerAnimal, induce, execute, seed)
}

#[derive(Deserialize)]
struct CauseEffectRecord {
    cause: String,
    effect: String,
}

fn cause_selection(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    let (path, text) = manifest.read("bigbench_cause_effect")?;
    let mut items: Vec<CauseEffectRecord> = parse_jsonl(&text, &path)?;
    let mut rng = subrng(seed, "cause_selection/split");
    items.shuffle(&mut rng);
    let half = items.len() / 2;

    let sentence_pair =
        |first: &str, second: &str| format!("Sentence 1: {first} Sentence 2: {second}");

    let mut induce = Vec::new();
    for item in &items[..half] {
        // Cause position is randomized per induce demonstration.
        let cause_first: bool = rng.gen();
        let input = if cause_first {
            sentence_pair(&item.cause, &item.effect)
        } else {
            sentence_pair(&item.effect, &item.cause)
        };
        induce.push(
            Demonstration::new(input, vec![item.cause.clone()])?
                .with_aux("cause_position", if cause_first { "1" } else { "2" }),
        );
    }
    // Execute presents both orderings of each held-out pair.
    let mut execute = Vec::new();
    for item in &items[half..] {
        execute.push(
            Demonstration::new(
                sentence_pair(&item.cause, &item.effect),
                vec![item.cause.clone()],
            )?
            .with_aux("cause_position", "1"),
        );
        execute.push(
            Demonstration::new(
                sentence_pair(&item.effect, &item.cause),
                vec![item.cause.clone()],
            )?
            .with_aux("cause_position", "2"),
        );
    }
    TaskDataset::new(TaskId::CauseSelection, induce, execute, seed)
}

#[derive(Deserialize)]
struct CommonConceptRecord {
    entities: Vec<String>,
    concept: String,
}

/// Strip the leading "task marker" a concept answer may carry, keeping the
/// verb phrase ("They all involve oscillations." becomes "involve
/// oscillations.").
fn strip_concept_marker(concept: &str) -> &str {
    const MARKERS: [&str; 2] = ["they are all ", "they all "];
    let lower = concept.to_lowercase();
    for marker in MARKERS {
        if lower.starts_with(marker) {
            return &concept[marker.len()..];
        }
    }
    concept
}

fn common_concept(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    let (path, text) = manifest.read("bigbench_common_concept")?;
    let mut items: Vec<CommonConceptRecord> = parse_jsonl(&text, &path)?;
    let mut rng = subrng(seed, "common_concept/split");
    items.shuffle(&mut rng);
    let half = items.len() / 2;

    let demo = |item: &CommonConceptRecord| -> Result<Demonstration> {
        Demonstration::new(
            item.entities.join(", "),
            vec![strip_concept_marker(&item.concept).to_string()],
        )
    };
    let induce: Vec<Demonstration> = items[..half].iter().map(demo).collect::<Result<_>>()?;
    let execute: Vec<Demonstration> = items[half..].iter().map(demo).collect::<Result<_>>()?;
    TaskDataset::new(TaskId::CommonConcept, induce, execute, seed)
}

fn formality(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    let (path, text) = manifest.read("formality_pairs")?;
    let rows = parse_tsv_rows(&text, &path, 2)?;
    let mut pool = Vec::new();
    let mut seen = HashSet::new();
    for row in rows {
        if seen.insert(row[0].clone()) {
            pool.push(Demonstration::new(row[0].clone(), vec![row[1].clone()])?);
        }
    }
    // Half induce, half execute, mirroring the common-concept split.
    let mut rng = subrng(seed, "formality/split");
    pool.shuffle(&mut rng);
    let execute = pool.split_off(pool.len() / 2);
    TaskDataset::new(TaskId::Formality, pool, execute, seed)
}

fn sum(seed: u64) -> Result<TaskDataset> {
    let mut pool = Vec::with_capacity(10_000);
    for a in 0..=99u32 {
        for b in 0..=99u32 {
            pool.push(Demonstration::new(
                format!("{a} {b}"),
                vec![(a + b).to_string()],
            )?);
        }
    }
    let mut rng = subrng(seed, "sum/split");
    let (induce, execute) = split_execute(pool, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(TaskId::Sum, induce, execute, seed)
}

fn diff(seed: u64) -> Result<TaskDataset> {
    // Ordered (larger, smaller) pairs so the output is both "second
    // subtracted from first" and non-negative.
    let mut pool = Vec::new();
    for a in 0..=198u32 {
        for b in 0..=a {
            pool.push(Demonstration::new(
                format!("{a} {b}"),
                vec![(a - b).to_string()],
            )?);
        }
    }
    let mut rng = subrng(seed, "diff/split");
    let (induce, execute) = split_execute(pool, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(TaskId::Diff, induce, execute, seed)
}

fn num_to_word(seed: u64) -> Result<TaskDataset> {
    let mut pool = Vec::with_capacity(10_000);
    for n in 0..=9999u32 {
        pool.push(Demonstration::new(n.to_string(), vec![number_to_words(n)])?);
    }
    let mut rng = subrng(seed, "num_to_word/split");
    let (induce, execute) = split_execute(pool, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(TaskId::NumToWord, induce, execute, seed)
}

fn translation(
    task: TaskId,
    lang: Lang,
    manifest: &SourceManifest,
    seed: u64,
) -> Result<TaskDataset> {
    let (_, cen) = load_cen(manifest)?;
    let source = format!("wiktionary_{}", lang.code());
    let (path, text) = manifest.read(&source)?;
    let mut lexicon = TranslationLexicon::default();
    lexicon.add_table(lang, &text, &path)?;

    let mut pool = Vec::new();
    for word in cen {
        if let Some(translations) = lexicon.translations(&word, lang) {
            pool.push(Demonstration::new(word, translations.to_vec())?);
        }
    }
    if pool.is_empty() {
        return Err(Error::EmptyResult(format!(
            "{task}: no common noun has a translation in '{source}'"
        )));
    }
    let mut rng = subrng(seed, &format!("{}/split", task.name()));
    let (induce, execute) = split_execute(pool, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(task, induce, execute, seed)
}

#[derive(Deserialize)]
struct SstRecord {
    sentence: String,
    label: String,
}

fn sentiment(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    let load = |id: &str| -> Result<Vec<Demonstration>> {
        let (path, text) = manifest.read(id)?;
        let records: Vec<SstRecord> = parse_jsonl(&text, &path)?;
        let mut seen = HashSet::new();
        let mut demos = Vec::new();
        for (i, r) in records.into_iter().enumerate() {
            if r.label != "positive" && r.label != "negative" {
                return Err(Error::parse(
                    &path,
                    i + 1,
                    format!("bad label '{}'", r.label),
                ));
            }
            if word_count(&r.sentence) <= 10 && seen.insert(r.sentence.clone()) {
                demos.push(
                    Demonstration::new(r.sentence, vec![r.label.clone()])?
                        .with_aux("label", r.label),
                );
            }
        }
        Ok(demos)
    };
    let induce = load("sst_train")?;
    let dev = load("sst_dev")?;
    let mut rng = subrng(seed, "sentiment/execute");
    let execute = sample_some(dev, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(TaskId::Sentiment, induce, execute, seed)
}

#[derive(Deserialize)]
struct StsbRecord {
    sentence1: String,
    sentence2: String,
    score: f64,
}

fn sentence_similarity(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    use crate::scoring::SIMILARITY_DESCRIPTORS;
    let load = |id: &str| -> Result<Vec<Demonstration>> {
        let (path, text) = manifest.read(id)?;
        let records: Vec<StsbRecord> = parse_jsonl(&text, &path)?;
        let mut seen = HashSet::new();
        let mut demos = Vec::new();
        for (i, r) in records.into_iter().enumerate() {
            if !(0.0..=5.0).contains(&r.score) {
                return Err(Error::parse(
                    &path,
                    i + 1,
                    format!("score {} out of range", r.score),
                ));
            }
            if word_count(&r.sentence1) > 10 || word_count(&r.sentence2) > 10 {
                continue;
            }
            let label = r.score.round_ties_even() as usize;
            let input = format!("Sentence 1: {} Sentence 2: {}", r.sentence1, r.sentence2);
            if !seen.insert(input.clone()) {
                continue;
            }
            let gold = format!("{label} - {}", SIMILARITY_DESCRIPTORS[label]);
            demos.push(Demonstration::new(input, vec![gold])?.with_aux("score", label.to_string()));
        }
        Ok(demos)
    };
    let induce = load("stsb_train")?;
    let dev = load("stsb_dev")?;
    let mut rng = subrng(seed, "sentence_similarity/execute");
    let execute = sample_some(dev, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(TaskId::SentenceSimilarity, induce, execute, seed)
}

#[derive(Deserialize)]
struct WicRecord {
    word: String,
    sentence1: String,
    sentence2: String,
    label: bool,
}

fn word_in_context(manifest: &SourceManifest, seed: u64) -> Result<TaskDataset> {
    let load = |id: &str| -> Result<Vec<Demonstration>> {
        let (path, text) = manifest.read(id)?;
        let records: Vec<WicRecord> = parse_jsonl(&text, &path)?;
        let mut seen = HashSet::new();
        let mut demos = Vec::new();
        for r in records {
            if word_count(&r.sentence1) > 10 || word_count(&r.sentence2) > 10 {
                continue;
            }
            let input = format!(
                "Sentence 1: {} Sentence 2: {} Word: {}",
                r.sentence1, r.sentence2, r.word
            );
            if !seen.insert(input.clone()) {
                continue;
            }
            let gold = if r.label { "same" } else { "not the same" };
            demos.push(Demonstration::new(input, vec![gold.to_string()])?.with_aux("label", gold));
        }
        Ok(demos)
    };
    let induce = load("wic_train")?;
    let dev = load("wic_dev")?;
    let mut rng = subrng(seed, "word_in_context/execute");
    let execute = sample_some(dev, EXECUTE_TARGET, &mut rng);
    TaskDataset::new(TaskId::WordInContext, induce, execute, seed)
}
