//! Integers in English words.

const UNITS: [&str; 20] = [
    "zero",
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "ten",
    "eleven",
    "twelve",
    "thirteen",
    "fourteen",
    "fifteen",
    "sixteen",
    "seventeen",
    "eighteen",
    "nineteen",
];

const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

/// Spell out a non-negative integer below one million. Tens and units are
/// hyphenated ("twenty-six"), no "and", no group commas:
/// 9999 is "nine thousand nine hundred ninety-nine".
pub fn number_to_words(n: u32) -> String {
    debug_assert!(n < 1_000_000);
    if n < 1000 {
        return below_thousand(n);
    }
    let thousands = below_thousand(n / 1000);
    let rest = n % 1000;
    if rest == 0 {
        format!("{thousands} thousand")
    } else {
        format!("{thousands} thousand {}", below_thousand(rest))
    }
}

fn below_thousand(n: u32) -> String {
    if n < 100 {
        return below_hundred(n);
    }
    let hundreds = format!("{} hundred", UNITS[(n / 100) as usize]);
    let rest = n % 100;
    if rest == 0 {
        hundreds
    } else {
        format!("{hundreds} {}", below_hundred(rest))
    }
}

fn below_hundred(n: u32) -> String {
    if n < 20 {
        return UNITS[n as usize].to_string();
    }
    let tens = TENS[(n / 10) as usize];
    let unit = n % 10;
    if unit == 0 {
        tens.to_string()
    } else {
        format!("{tens}-{}", UNITS[unit as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_forms() {
        assert_eq!(number_to_words(0), "zero");
        assert_eq!(number_to_words(13), "thirteen");
        assert_eq!(number_to_words(26), "twenty-six");
        assert_eq!(number_to_words(40), "forty");
        assert_eq!(number_to_words(100), "one hundred");
        assert_eq!(number_to_words(105), "one hundred five");
        assert_eq!(number_to_words(999), "nine hundred ninety-nine");
        assert_eq!(number_to_words(1000), "one thousand");
        assert_eq!(number_to_words(1100), "one thousand one hundred");
        assert_eq!(number_to_words(2026), "two thousand twenty-six");
        assert_eq!(
            number_to_words(9999),
            "nine thousand nine hundred ninety-nine"
        );
    }

    /// Independent recursive construction to cross-check the whole range.
    fn oracle(n: u32) -> String {
        fn parts(n: u32, out: &mut Vec<String>) {
            match n {
                0..=19 => out.push(UNITS[n as usize].to_string()),
                20..=99 => {
                    if n.is_multiple_of(10) {
                        out.push(TENS[(n / 10) as usize].to_string());
                    } else {
                        out.push(format!(
                            "{}-{}",
                            TENS[(n / 10) as usize],
                            UNITS[(n % 10) as usize]
                        ));
                    }
                }
                100..=999 => {
                    parts(n / 100, out);
                    out.push("hundred".to_string());
                    if !n.is_multiple_of(100) {
                        parts(n % 100, out);
                    }
                }
                _ => {
                    parts(n / 1000, out);
                    out.push("thousand".to_string());
                    if !n.is_multiple_of(1000) {
                        parts(n % 1000, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        parts(n, &mut out);
        out.join(" ")
    }

    #[test]
    fn matches_oracle_over_task_range() {
        for n in 0..=9999 {
            assert_eq!(number_to_words(n), oracle(n), "n = {n}");
        }
    }
}
