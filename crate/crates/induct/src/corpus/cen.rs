//! Common-English-noun list derivation.

use crate::corpus::{FrequencyTable, NounRecord};
use crate::error::{Error, Result};

/// Filter the noun file down to common English nouns: words that are among
/// the `top_k` most frequent, tagged "NN" with lemma equal to the word
/// itself, and at least `min_len` letters long. Output is sorted and
/// deduplicated; an empty result signals mismatched sources and is a hard
/// error.
pub fn build_cen(
    freq_table: &FrequencyTable,
    nouns: &[NounRecord],
    top_k: usize,
    min_len: usize,
) -> Result<Vec<String>> {
    if top_k == 0 || min_len == 0 {
        return Err(Error::InvalidArgument(
            "build_cen: top_k and min_len must be at least 1".into(),
        ));
    }
    if freq_table.is_empty() {
        return Err(Error::InvalidArgument(
            "build_cen: empty frequency table".into(),
        ));
    }
    let top = freq_table.top_k(top_k);
    let mut cen: Vec<String> = nouns
        .iter()
        .filter(|n| n.tag == "NN" && n.lemma == n.word && n.word.chars().count() >= min_len)
        .filter(|n| top.contains(&n.word))
        .map(|n| n.word.clone())
        .collect();
    cen.sort();
    cen.dedup();
    if cen.is_empty() {
        return Err(Error::EmptyResult(
            "build_cen produced no nouns; frequency table and noun file do not match".into(),
        ));
    }
    Ok(cen)
}
