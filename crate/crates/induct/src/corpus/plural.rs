//! English pluralization as a rule cascade.

/// Irregular singular → plural forms, checked before any suffix rule.
/// Includes o-words that take -es, since the suffix cascade defaults
/// o-finals to plain -s.
const IRREGULAR: &[(&str, &str)] = &[
    ("child", "children"),
    ("echo", "echoes"),
    ("foot", "feet"),
    ("goose", "geese"),
    ("hero", "heroes"),
    ("louse", "lice"),
    ("man", "men"),
    ("mouse", "mice"),
    ("ox", "oxen"),
    ("person", "people"),
    ("potato", "potatoes"),
    ("quiz", "quizzes"),
    ("tomato", "tomatoes"),
    ("tooth", "teeth"),
    ("torpedo", "torpedoes"),
    ("veto", "vetoes"),
    ("woman", "women"),
];

/// Words whose plural equals the singular.
const INVARIANT: &[&str] = &[
    "aircraft", "bison", "deer", "fish", "moose", "salmon", "scissors", "series", "sheep",
    "shrimp", "species", "swine", "trout",
];

/// f/fe-final words that take -ves. Other f-finals (roof, chief, belief)
/// take plain -s via the default rule.
const F_TO_VES: &[&str] = &[
    "calf", "elf", "half", "knife", "leaf", "life", "loaf", "scarf", "self", "shelf", "thief",
    "wife", "wolf",
];

/// Whether `word` pluralizes to itself.
pub fn is_invariant_plural(word: &str) -> bool {
    INVARIANT.contains(&word)
}

/// Plural of a lowercase singular English noun.
///
/// Rule cascade: irregular table, invariant forms, -is → -es,
/// consonant + y → -ies, sibilant endings (+es), the f/fe → -ves list,
/// then the default +s. Total: never empty for non-empty input.
pub fn pluralize(noun: &str) -> String {
    if noun.is_empty() {
        return String::new();
    }
    if let Some((_, plural)) = IRREGULAR.iter().find(|(s, _)| *s == noun) {
        return (*plural).to_string();
    }
    if is_invariant_plural(noun) {
        return noun.to_string();
    }
    if let Some(stem) = noun.strip_suffix("is") {
        if !stem.is_empty() {
            return format!("{stem}es");
        }
    }
    if let Some(stem) = noun.strip_suffix('y') {
        if stem
            .chars()
            .last()
            .map(|c| !matches!(c, 'a' | 'e' | 'i' | 'o' | 'u'))
            .unwrap_or(false)
        {
            return format!("{stem}ies");
        }
    }
    if noun.ends_with('s')
        || noun.ends_with('x')
        || noun.ends_with('z')
        || noun.ends_with("ch")
        || noun.ends_with("sh")
    {
        return format!("{noun}es");
    }
    if F_TO_VES.contains(&noun) {
        let stem = noun
            .strip_suffix("fe")
            .or_else(|| noun.strip_suffix('f'))
            .unwrap();
        return format!("{stem}ves");
    }
    format!("{noun}s")
}
