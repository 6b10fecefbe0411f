//! Rhyme grouping over a pronouncing dictionary.
//!
//! Two words rhyme when their phoneme suffixes from the last
//! primary-stressed vowel onward are identical (the perfect-rhyme reading
//! of the dictionary's stress markers).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Lexicon, PronDict};

/// Disjoint rhyme groups plus a word → group index.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RhymeGroups {
    /// Each group holds two or more words, sorted; groups are ordered by
    /// their rime key so builds are deterministic.
    pub groups: Vec<Vec<String>>,
    pub index: BTreeMap<String, usize>,
}

impl RhymeGroups {
    pub fn group_of(&self, word: &str) -> Option<&[String]> {
        self.index.get(word).map(|&g| self.groups[g].as_slice())
    }

    /// Group members other than `word` itself.
    pub fn rhymes_of(&self, word: &str) -> Vec<String> {
        self.group_of(word)
            .map(|g| g.iter().filter(|w| w.as_str() != word).cloned().collect())
            .unwrap_or_default()
    }
}

/// Lexicon words that could not be grouped, reported alongside the groups.
#[derive(Debug, Clone, Default)]
pub struct RhymeDiagnostics {
    /// Not present in the pronouncing dictionary.
    pub missing: Vec<String>,
    /// Present, but carrying no stressed vowel to anchor a rime.
    pub unrhymable: Vec<String>,
}

/// The rime: phonemes from the last primary-stressed vowel (stress marker
/// `1`) to the end. Words without a primary stress fall back to the last
/// vowel bearing any stress digit; words with no vowel at all have no rime.
pub fn rhyme_key(phones: &[String]) -> Option<Vec<String>> {
    let last_primary = phones.iter().rposition(|p| p.contains('1'));
    let anchor = last_primary.or_else(|| {
        phones
            .iter()
            .rposition(|p| p.chars().any(|c| c.is_ascii_digit()))
    })?;
    Some(phones[anchor..].to_vec())
}

/// Partition the lexicon's words into rhyme groups. Words missing from the
/// dictionary are excluded and reported in the diagnostics; groups that end
/// up with fewer than two words are dropped.
pub fn build_rhyme_groups(dict: &PronDict, lexicon: &Lexicon) -> (RhymeGroups, RhymeDiagnostics) {
    let mut diagnostics = RhymeDiagnostics::default();
    let mut by_rime: BTreeMap<Vec<String>, Vec<String>> = BTreeMap::new();

    let mut words: Vec<String> = lexicon.items.iter().map(|e| e.word.clone()).collect();
    words.sort();
    words.dedup();

    for word in words {
        let Some(phones) = dict.phones(&word) else {
            diagnostics.missing.push(word);
            continue;
        };
        match rhyme_key(phones) {
            Some(key) => by_rime.entry(key).or_default().push(word),
            None => diagnostics.unrhymable.push(word),
        }
    }

    let mut groups = RhymeGroups::default();
    for (_, members) in by_rime {
        if members.len() < 2 {
            continue;
        }
        let id = groups.groups.len();
        for w in &members {
            groups.index.insert(w.clone(), id);
        }
        groups.groups.push(members);
    }
    (groups, diagnostics)
}
