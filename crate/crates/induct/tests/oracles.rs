//! Independent-oracle checks over the bundled fixtures: each derived
//! resource is recomputed here by a deliberately naive route and compared
//! against both the implementation and the committed golden files.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use induct::corpus::{
    build_cen, build_rhyme_groups, pluralize, rhyme_key, CefrLevel, FrequencyTable, Lexicon,
    NounRecord, PronDict,
};

use common::{fixture_manifest, read_golden};

/// Naive top-k + tag + lemma + length filter, written without reusing the
/// library's helpers.
fn naive_cen(freq_lines: &[(String, u64)], nouns: &[NounRecord]) -> Vec<String> {
    let mut ranked: Vec<&(String, u64)> = freq_lines.iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let top: BTreeSet<&str> = ranked
        .iter()
        .take(10_000)
        .map(|(w, _)| w.as_str())
        .collect();
    let mut out = BTreeSet::new();
    for n in nouns {
        if n.tag == "NN" && n.lemma == n.word && n.word.len() >= 3 && top.contains(n.word.as_str())
        {
            out.insert(n.word.clone());
        }
    }
    out.into_iter().collect()
}

fn parse_freq_lines(text: &str) -> Vec<(String, u64)> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (w, c) = l.split_once('\t').unwrap();
            (w.to_string(), c.trim().parse().unwrap())
        })
        .collect()
}

#[test]
fn cen_matches_naive_filter_and_golden_bytes() {
    let manifest = fixture_manifest();
    let (freq_path, freq_text) = manifest.read("freq_table").unwrap();
    let (nouns_path, nouns_text) = manifest.read("nouns").unwrap();
    let freq = FrequencyTable::parse(&freq_text, &freq_path).unwrap();
    let nouns = NounRecord::parse_tsv(&nouns_text, &nouns_path).unwrap();

    let cen = build_cen(&freq, &nouns, 10_000, 3).unwrap();
    assert_eq!(cen.len(), 57, "fixture-defined common-noun count");

    let naive = naive_cen(&parse_freq_lines(&freq_text), &nouns);
    assert_eq!(cen, naive, "implementation disagrees with the naive filter");

    let golden = read_golden("cen.txt");
    assert_eq!(
        format!("{}\n", cen.join("\n")),
        golden,
        "golden bytes differ"
    );
}

#[test]
fn cen_top_k_cut_bites_on_small_k() {
    let manifest = fixture_manifest();
    let (freq_path, freq_text) = manifest.read("freq_table").unwrap();
    let (nouns_path, nouns_text) = manifest.read("nouns").unwrap();
    let freq = FrequencyTable::parse(&freq_text, &freq_path).unwrap();
    let nouns = NounRecord::parse_tsv(&nouns_text, &nouns_path).unwrap();

    let small = build_cen(&freq, &nouns, 30, 3).unwrap();
    let full = build_cen(&freq, &nouns, 10_000, 3).unwrap();
    assert!(small.len() < full.len());
    // Subset relation: the small cut only removes words.
    assert!(small.iter().all(|w| full.contains(w)));

    // And it agrees with the naive filter at the same k.
    let mut ranked = parse_freq_lines(&freq_text);
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let top: BTreeSet<&str> = ranked.iter().take(30).map(|(w, _)| w.as_str()).collect();
    let naive: Vec<String> = full
        .iter()
        .filter(|w| top.contains(w.as_str()))
        .cloned()
        .collect();
    assert_eq!(small, naive);
}

/// Brute-force pairwise rime comparison over the fixture dictionary: two
/// lexicon words land in one group iff their rimes are equal.
#[test]
fn rhyme_groups_match_pairwise_oracle() {
    let manifest = fixture_manifest();
    let (lex_path, lex_text) = manifest.read("cefr_lexicon").unwrap();
    let lexicon = Lexicon::parse(&lex_text, &lex_path).unwrap();
    let eligible = Lexicon {
        items: lexicon
            .items
            .into_iter()
            .filter(|e| matches!(e.cefr, CefrLevel::A1 | CefrLevel::A2 | CefrLevel::B1))
            .collect(),
    };
    let (dict_path, dict_text) = manifest.read("pron_dict").unwrap();
    let dict = PronDict::parse(&dict_text, &dict_path).unwrap();

    let (groups, diagnostics) = build_rhyme_groups(&dict, &eligible);

    // O(n^2) oracle.
    let words: Vec<&str> = eligible
        .items
        .iter()
        .map(|e| e.word.as_str())
        .filter(|w| dict.phones(w).is_some())
        .collect();
    let mut expected_pairs = BTreeSet::new();
    for (i, a) in words.iter().enumerate() {
        for b in words.iter().skip(i + 1) {
            let ka = rhyme_key(dict.phones(a).unwrap());
            let kb = rhyme_key(dict.phones(b).unwrap());
            if ka.is_some() && ka == kb {
                let (x, y) = if a < b { (a, b) } else { (b, a) };
                expected_pairs.insert((x.to_string(), y.to_string()));
            }
        }
    }
    let mut actual_pairs = BTreeSet::new();
    for group in &groups.groups {
        for (i, a) in group.iter().enumerate() {
            for b in group.iter().skip(i + 1) {
                actual_pairs.insert((a.clone(), b.clone()));
            }
        }
    }
    assert_eq!(
        actual_pairs, expected_pairs,
        "group partition disagrees with pairwise oracle"
    );

    // Invariants: disjoint groups, consistent index, minimum size two.
    let mut seen = BTreeSet::new();
    for group in &groups.groups {
        assert!(group.len() >= 2);
        for w in group {
            assert!(seen.insert(w.clone()), "word '{w}' in two groups");
        }
    }
    for (word, &gid) in &groups.index {
        assert!(groups.groups[gid].contains(word));
    }
    // Missing words are reported, not dropped silently.
    for w in &diagnostics.missing {
        assert!(dict.phones(w).is_none());
    }
}

/// The pluralization pool derived by hand from the fixture design: common
/// nouns minus mass nouns, keeping plurals the corpus saw at least 50
/// times.
#[test]
fn pluralization_pool_matches_hand_derivation() {
    let manifest = fixture_manifest();
    let (freq_path, freq_text) = manifest.read("freq_table").unwrap();
    let freq = FrequencyTable::parse(&freq_text, &freq_path).unwrap();
    let (nouns_path, nouns_text) = manifest.read("nouns").unwrap();
    let nouns = NounRecord::parse_tsv(&nouns_text, &nouns_path).unwrap();
    let cen = build_cen(&freq, &nouns, 10_000, 3).unwrap();
    let (_, mass_text) = manifest.read("mass_nouns").unwrap();
    let mass: BTreeSet<String> = induct::corpus::parse_word_list(&mass_text)
        .into_iter()
        .collect();

    let expected: BTreeMap<String, String> = cen
        .iter()
        .filter(|w| !mass.contains(*w))
        .map(|w| (w.clone(), pluralize(w)))
        .filter(|(_, p)| freq.count(p) >= 50)
        .collect();
    assert_eq!(expected.len(), 45, "fixture-defined pair count");

    // The golden dataset holds exactly these pairs (split across induce
    // and execute).
    let golden = read_golden("pluralization.jsonl");
    let mut golden_pairs = BTreeMap::new();
    for line in golden.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        if v.get("split").is_some() {
            golden_pairs.insert(
                v["input"].as_str().unwrap().to_string(),
                v["gold"][0].as_str().unwrap().to_string(),
            );
        }
    }
    assert_eq!(golden_pairs, expected);
}

#[test]
fn pluralize_agrees_with_reference_list() {
    // Standard inflection reference forms committed as a fixture-style
    // table (all checked against an ordinary English dictionary).
    for (singular, plural) in [
        ("cat", "cats"),
        ("life", "lives"),
        ("box", "boxes"),
        ("city", "cities"),
        ("man", "men"),
        ("woman", "women"),
        ("child", "children"),
        ("tooth", "teeth"),
        ("analysis", "analyses"),
        ("bus", "buses"),
        ("hero", "heroes"),
        ("piano", "pianos"),
        ("sheep", "sheep"),
        ("wolf", "wolves"),
        ("roof", "roofs"),
        ("key", "keys"),
        ("lady", "ladies"),
        ("church", "churches"),
        ("dish", "dishes"),
        ("fox", "foxes"),
    ] {
        assert_eq!(pluralize(singular), plural, "for '{singular}'");
    }
}
