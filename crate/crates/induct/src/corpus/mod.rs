//! Source ingestion and derived lexical resources.
//!
//! Everything external enters through a [`SourceManifest`]: a JSON file
//! pinning each source (lexicons, frequency tables, the pronouncing
//! dictionary, translation tables, dataset exports) to a path, a sha256
//! digest, and a format. Generation refuses to start on a digest mismatch,
//! which is what makes dataset builds reproducible byte-for-byte.
//!
//! Derived resources built here: the common-English-noun list
//! ([`build_cen`]), the rule-cascade pluralizer ([`pluralize`]), and rhyme
//! groups over a pronouncing dictionary ([`build_rhyme_groups`]).

mod cen;
mod manifest;
mod plural;
mod rhyme;

pub use cen::build_cen;
pub use manifest::{sha256_hex, SourceEntry, SourceFormat, SourceManifest};
pub use plural::{is_invariant_plural, pluralize};
pub use rhyme::{build_rhyme_groups, rhyme_key, RhymeDiagnostics};

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Word-frequency table ("word\tcount" lines).
#[derive(Debug, Clone, Default)]
pub struct FrequencyTable {
    entries: Vec<(String, u64)>,
    counts: HashMap<String, u64>,
}

impl FrequencyTable {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        let mut counts = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, idx + 1, "expected 'word<TAB>count'"))?;
            let count: u64 = count.trim().parse().map_err(|_| {
                Error::parse(path, idx + 1, format!("bad count '{}'", count.trim()))
            })?;
            let word = word.trim().to_string();
            if let std::collections::hash_map::Entry::Vacant(slot) = counts.entry(word.clone()) {
                slot.insert(count);
                entries.push((word, count));
            }
        }
        Ok(FrequencyTable { entries, counts })
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    /// The `top_k` most frequent words. Ties break lexicographically so the
    /// cut is stable across platforms.
    pub fn top_k(&self, k: usize) -> HashSet<String> {
        let mut sorted: Vec<&(String, u64)> = self.entries.iter().collect();
        sorted.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        sorted.into_iter().take(k).map(|(w, _)| w.clone()).collect()
    }
}

/// One row of a precomputed noun file: word, lemma, POS tag, corpus count.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct NounRecord {
    pub word: String,
    pub lemma: String,
    pub tag: String,
    pub frequency: u64,
}

impl NounRecord {
    pub fn parse_tsv(text: &str, path: &Path) -> Result<Vec<NounRecord>> {
        let mut records = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!(
                        "expected 4 columns (word, lemma, tag, frequency), got {}",
                        cols.len()
                    ),
                ));
            }
            let frequency: u64 = cols[3]
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, idx + 1, format!("bad frequency '{}'", cols[3])))?;
            if cols[0].trim().is_empty() {
                return Err(Error::parse(path, idx + 1, "empty word"));
            }
            records.push(NounRecord {
                word: cols[0].trim().to_string(),
                lemma: cols[1].trim().to_string(),
                tag: cols[2].trim().to_string(),
                frequency,
            });
        }
        Ok(records)
    }
}

/// CEFR proficiency level of a lexicon word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CefrLevel {
    A1,
    A2,
    B1,
    B2,
    C1,
    C2,
}

impl CefrLevel {
    pub fn parse(s: &str) -> Option<CefrLevel> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A1" => Some(CefrLevel::A1),
            "A2" => Some(CefrLevel::A2),
            "B1" => Some(CefrLevel::B1),
            "B2" => Some(CefrLevel::B2),
            "C1" => Some(CefrLevel::C1),
            "C2" => Some(CefrLevel::C2),
            _ => None,
        }
    }
}

/// Word category used by the membership task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Animals,
    Clothing,
    Colors,
    Food,
    Vehicles,
    Professions,
    None,
}

impl Category {
    /// The five non-animal categories a membership list can draw from.
    pub const OTHERS: [Category; 5] = [
        Category::Clothing,
        Category::Colors,
        Category::Food,
        Category::Vehicles,
        Category::Professions,
    ];

    pub fn parse(s: &str) -> Option<Category> {
        match s.trim().to_ascii_lowercase().as_str() {
            "animals" => Some(Category::Animals),
            "clothing" => Some(Category::Clothing),
            "colors" => Some(Category::Colors),
            "food" => Some(Category::Food),
            "vehicles" => Some(Category::Vehicles),
            "professions" => Some(Category::Professions),
            "none" | "" => Some(Category::None),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub word: String,
    pub cefr: CefrLevel,
    pub category: Category,
}

/// A categorized, CEFR-levelled word list ("word\tlevel\tcategory").
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    pub items: Vec<LexiconEntry>,
}

impl Lexicon {
    pub fn parse(text: &str, path: &Path) -> Result<Lexicon> {
        let mut items: Vec<LexiconEntry> = Vec::new();
        let mut seen = HashSet::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() < 2 {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    "expected 'word<TAB>level[<TAB>category]'",
                ));
            }
            let word = cols[0].trim().to_string();
            if word.is_empty() {
                return Err(Error::parse(path, idx + 1, "empty word"));
            }
            if !seen.insert(word.clone()) {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("duplicate word '{word}'"),
                ));
            }
            let cefr = CefrLevel::parse(cols[1]).ok_or_else(|| {
                Error::parse(path, idx + 1, format!("bad CEFR level '{}'", cols[1]))
            })?;
            let category = match cols.get(2) {
                Some(c) => Category::parse(c)
                    .ok_or_else(|| Error::parse(path, idx + 1, format!("bad category '{}'", c)))?,
                None => Category::None,
            };
            items.push(LexiconEntry {
                word,
                cefr,
                category,
            });
        }
        Ok(Lexicon { items })
    }

    pub fn words_at_levels(&self, levels: &[CefrLevel]) -> Vec<String> {
        self.items
            .iter()
            .filter(|e| levels.contains(&e.cefr))
            .map(|e| e.word.clone())
            .collect()
    }

    pub fn words_in_category(&self, category: Category) -> Vec<String> {
        self.items
            .iter()
            .filter(|e| e.category == category)
            .map(|e| e.word.clone())
            .collect()
    }
}

/// Pronouncing dictionary in the CMU native format:
/// `WORD  PH1 PH2 ...`, with `;;;`-prefixed comments and `WORD(2)` variant
/// lines for alternate pronunciations (only the first pronunciation is
/// retained).
#[derive(Debug, Clone, Default)]
pub struct PronDict {
    entries: BTreeMap<String, Vec<String>>,
}

impl PronDict {
    pub fn parse(text: &str, path: &Path) -> Result<PronDict> {
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with(";;;") || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts
                .next()
                .ok_or_else(|| Error::parse(path, idx + 1, "missing word"))?;
            // Alternate pronunciations look like "WORD(2)"; skip them.
            if head.ends_with(')') && head.contains('(') {
                continue;
            }
            let phones: Vec<String> = parts.map(|p| p.to_string()).collect();
            if phones.is_empty() {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("no phonemes for '{head}'"),
                ));
            }
            entries.entry(head.to_ascii_lowercase()).or_insert(phones);
        }
        Ok(PronDict { entries })
    }

    pub fn phones(&self, word: &str) -> Option<&[String]> {
        self.entries
            .get(&word.to_ascii_lowercase())
            .map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Target language of a translation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    De,
    Es,
    Fr,
}

impl Lang {
    pub fn code(&self) -> &'static str {
        match self {
            Lang::De => "de",
            Lang::Es => "es",
            Lang::Fr => "fr",
        }
    }
}

/// English → per-language translation sets.
#[derive(Debug, Clone, Default)]
pub struct TranslationLexicon {
    pub entries: BTreeMap<String, BTreeMap<Lang, Vec<String>>>,
}

impl TranslationLexicon {
    /// Merge a single-language "english\ttranslation" table in.
    /// Repeated english words accumulate translations (insertion order,
    /// deduplicated).
    pub fn add_table(&mut self, lang: Lang, text: &str, path: &Path) -> Result<()> {
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (en, tr) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, idx + 1, "expected 'english<TAB>translation'"))?;
            let en = en.trim().to_string();
            let tr = tr.trim().to_string();
            if en.is_empty() || tr.is_empty() {
                return Err(Error::parse(path, idx + 1, "empty word or translation"));
            }
            let set = self.entries.entry(en).or_default().entry(lang).or_default();
            if !set.contains(&tr) {
                set.push(tr);
            }
        }
        Ok(())
    }

    pub fn translations(&self, word: &str, lang: Lang) -> Option<&[String]> {
        self.entries
            .get(word)
            .and_then(|m| m.get(&lang))
            .map(|v| v.as_slice())
    }
}

/// Parse a plain word list (one word per line, '#' comments).
pub fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_string())
        .collect()
}

/// Parse a tab-separated file into rows of columns ('#' comments skipped).
/// `min_cols` guards against ragged rows.
pub fn parse_tsv_rows(text: &str, path: &Path, min_cols: usize) -> Result<Vec<Vec<String>>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<String> = line.split('\t').map(|c| c.trim().to_string()).collect();
        if cols.len() < min_cols {
            return Err(Error::parse(
                path,
                idx + 1,
                format!(
                    "expected at least {min_cols} tab-separated columns, got {}",
                    cols.len()
                ),
            ));
        }
        rows.push(cols);
    }
    Ok(rows)
}

/// Parse a JSONL file into typed records, reporting the offending line on
/// failure.
pub fn parse_jsonl<T: serde::de::DeserializeOwned>(text: &str, path: &Path) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: T =
            serde_json::from_str(line).map_err(|e| Error::parse(path, idx + 1, e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}
