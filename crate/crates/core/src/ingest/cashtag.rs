//! Cashtag extraction.
//!
//! A cashtag is `$` followed by 1–6 ASCII letters, optionally followed by a
//! `.` and a 1–2 letter share-class suffix (`$BRK.B`). The token must be
//! delimited on both sides by the start/end of the text or a
//! non-alphanumeric character. `$` followed by a digit is a currency amount
//! and never a cashtag.

const MAX_SYMBOL_LETTERS: usize = 6;
const MAX_SUFFIX_LETTERS: usize = 2;

/// Extract the distinct cashtags of `text`, uppercased, in order of first
/// occurrence.
pub fn extract_cashtags(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < n {
        if chars[i] != '$' || (i > 0 && chars[i - 1].is_alphanumeric()) {
            i += 1;
            continue;
        }
        let start = i + 1;
        let letters_end = scan_letters(&chars, start);
        let letters = letters_end - start;
        if letters == 0 || letters > MAX_SYMBOL_LETTERS {
            i = letters_end.max(i + 1);
            continue;
        }

        let mut end = letters_end;
        if letters_end < n && chars[letters_end] == '.' {
            let suffix_end = scan_letters(&chars, letters_end + 1);
            let suffix = suffix_end - letters_end - 1;
            if (1..=MAX_SUFFIX_LETTERS).contains(&suffix) && is_delimiter(&chars, suffix_end) {
                end = suffix_end;
            }
        }
        if end == letters_end && !is_delimiter(&chars, letters_end) {
            i = letters_end;
            continue;
        }

        let ticker: String = chars[start..end]
            .iter()
            .map(|c| c.to_ascii_uppercase())
            .collect();
        if !out.contains(&ticker) {
            out.push(ticker);
        }
        i = end;
    }
    out
}

fn scan_letters(chars: &[char], from: usize) -> usize {
    let mut j = from;
    while j < chars.len() && chars[j].is_ascii_alphabetic() {
        j += 1;
    }
    j
}

fn is_delimiter(chars: &[char], at: usize) -> bool {
    at >= chars.len() || !chars[at].is_alphanumeric()
}

/// True if `symbol` (without the `$`) is an uppercase ticker in the grammar.
pub fn is_valid_ticker(symbol: &str) -> bool {
    let (base, suffix) = match symbol.split_once('.') {
        Some((b, s)) => (b, Some(s)),
        None => (symbol, None),
    };
    let upper_letters = |s: &str, max: usize| {
        !s.is_empty() && s.len() <= max && s.bytes().all(|b| b.is_ascii_uppercase())
    };
    upper_letters(base, MAX_SYMBOL_LETTERS)
        && suffix.is_none_or(|s| upper_letters(s, MAX_SUFFIX_LETTERS))
}

/// Normalize a ticker given in a record field: strips one leading `$`,
/// uppercases, and validates the grammar.
pub fn normalize_ticker(raw: &str) -> Option<String> {
    let trimmed = raw.trim();
    let symbol = trimmed.strip_prefix('$').unwrap_or(trimmed);
    let upper = symbol.to_ascii_uppercase();
    is_valid_ticker(&upper).then_some(upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sample_tweet_cashtags() {
        assert_eq!(
            extract_cashtags("Watch $AAPL, $WMT and $AMZN today"),
            vec!["AAPL", "WMT", "AMZN"]
        );
    }

    #[test]
    fn empty_text() {
        assert!(extract_cashtags("").is_empty());
    }

    #[test]
    fn currency_amounts_and_case_folding() {
        assert_eq!(
            extract_cashtags("price is $12.50 for $aapl $AAPL"),
            vec!["AAPL"]
        );
    }

    #[test]
    fn delimiting_rules() {
        assert!(extract_cashtags("a$AAPL").is_empty());
        assert!(extract_cashtags("$AAPL1").is_empty());
        assert!(extract_cashtags("$ABCDEFG").is_empty());
        assert_eq!(extract_cashtags("$ABCDEF!"), vec!["ABCDEF"]);
        assert_eq!(extract_cashtags("($XXII)"), vec!["XXII"]);
        assert_eq!(extract_cashtags("$$TSLA"), vec!["TSLA"]);
        assert!(extract_cashtags("$").is_empty());
        assert!(extract_cashtags("$é").is_empty());
    }

    #[test]
    fn class_suffix() {
        assert_eq!(extract_cashtags("long $brk.b now"), vec!["BRK.B"]);
        assert_eq!(extract_cashtags("$BF.AB"), vec!["BF.AB"]);
        // Suffix too long: the dot acts as a delimiter.
        assert_eq!(extract_cashtags("$AAPL.com"), vec!["AAPL"]);
        assert_eq!(extract_cashtags("I like $AAPL."), vec!["AAPL"]);
        assert_eq!(extract_cashtags("$AAPL.B2"), vec!["AAPL"]);
    }

    #[test]
    fn ticker_validation() {
        assert!(is_valid_ticker("AAPL"));
        assert!(is_valid_ticker("BRK.B"));
        assert!(!is_valid_ticker("aapl"));
        assert!(!is_valid_ticker("TOOLONG"));
        assert!(!is_valid_ticker("A.BCD"));
        assert!(!is_valid_ticker(""));
        assert_eq!(normalize_ticker("$aapl").as_deref(), Some("AAPL"));
        assert_eq!(normalize_ticker("12"), None);
    }

    proptest! {
        #[test]
        fn idempotent_on_joined_output(text in "[ a-zA-Z0-9$.,!]{0,60}") {
            let tags = extract_cashtags(&text);
            let joined: String = tags.iter().map(|t| format!("${t}")).collect::<Vec<_>>().join(" ");
            prop_assert_eq!(extract_cashtags(&joined), tags.clone());
            prop_assert_eq!(extract_cashtags(&format!("  \t{text}\n ")), tags);
        }

        #[test]
        fn output_is_valid_and_distinct(text in "[ a-zA-Z0-9$.]{0,60}") {
            let tags = extract_cashtags(&text);
            for t in &tags {
                prop_assert!(is_valid_ticker(t));
            }
            let mut sorted = tags.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), tags.len());
        }
    }
}
