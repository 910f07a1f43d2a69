/// Lowercases `text` and splits it into word tokens.
///
/// Any character that is neither alphanumeric nor one of `&` and `'` is a
/// separator, so tickers such as `s&p` and contractions such as `don't`
/// survive as single tokens. Leading and trailing `&`/`'` are stripped and
/// tokens made only of numeric characters are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    lower
        .split(|c: char| !(c.is_alphanumeric() || c == '&' || c == '\''))
        .map(|piece| piece.trim_matches(|c| c == '&' || c == '\''))
        .filter(|tok| !tok.is_empty() && !tok.chars().all(char::is_numeric))
        .map(str::to_owned)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_sentence() {
        assert_eq!(tokenize("Oil is UGLY today!!"), ["oil", "is", "ugly", "today"]);
    }

    #[test]
    fn keeps_ampersand_and_apostrophe_inside_words() {
        assert_eq!(tokenize("S&P cuts, crazy"), ["s&p", "cuts", "crazy"]);
        assert_eq!(tokenize("don't 'quote' &amp"), ["don't", "quote", "amp"]);
    }

    #[test]
    fn drops_numbers() {
        assert!(tokenize("12345").is_empty());
        assert_eq!(tokenize("3.5 pct 3rd"), ["pct", "3rd"]);
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  ... !!").is_empty());
    }

    proptest! {
        #[test]
        fn idempotent_on_joined_output(s in "\\PC{0,60}") {
            let once = tokenize(&s);
            let twice = tokenize(&once.join(" "));
            prop_assert_eq!(once, twice);
        }
    }
}
