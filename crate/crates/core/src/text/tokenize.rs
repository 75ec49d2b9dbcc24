//! Whitespace/punctuation tokenizer and the 40-token crop.

/// Maximum tokens kept per sentence.
pub const MAX_TOKENS: usize = 40;

/// Lowercase and split on whitespace and punctuation boundaries.
///
/// Runs of letters and digits form tokens ("bs", "68", "d50"); a period
/// between two digits stays inside the number ("3.2"). Sentence-level marks
/// (`. , ! ? ; :`) are kept as single-character tokens; every other
/// punctuation character is a plain separator, so "mg/dL" splits into
/// "mg", "dl".
pub fn tokenize(sentence: &str) -> Vec<String> {
    const KEPT_MARKS: &[char] = &['.', ',', '!', '?', ';', ':'];
    let chars: Vec<char> = sentence.to_lowercase().chars().collect();
    let mut tokens = Vec::new();
    let mut run = String::new();
    for i in 0..chars.len() {
        let c = chars[i];
        if c.is_alphanumeric() {
            run.push(c);
            continue;
        }
        let decimal_point = c == '.'
            && i > 0
            && chars[i - 1].is_ascii_digit()
            && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())
            && run.chars().all(|r| r.is_ascii_digit());
        if decimal_point {
            run.push('.');
            continue;
        }
        if !run.is_empty() {
            tokens.push(std::mem::take(&mut run));
        }
        if KEPT_MARKS.contains(&c) {
            tokens.push(c.to_string());
        }
    }
    if !run.is_empty() {
        tokens.push(run);
    }
    tokens
}

/// Keep the first [`MAX_TOKENS`] tokens; shorter inputs pass through.
pub fn crop_tokens(mut tokens: Vec<String>) -> Vec<String> {
    tokens.truncate(MAX_TOKENS);
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn glucose_phrases() {
        assert_eq!(toks("BS is 68"), ["bs", "is", "68"]);
        assert_eq!(toks("fsbs noted to be 9"), ["fsbs", "noted", "to", "be", "9"]);
    }

    #[test]
    fn casing_and_kept_marks() {
        assert_eq!(
            toks("She has LOW bs level!"),
            ["she", "has", "low", "bs", "level", "!"]
        );
    }

    #[test]
    fn punctuation_split() {
        assert_eq!(toks("68 mg/dL"), ["68", "mg", "dl"]);
        assert_eq!(toks("3.2 mmol/L"), ["3.2", "mmol", "l"]);
        assert_eq!(toks("shaky, sweaty"), ["shaky", ",", "sweaty"]);
    }

    #[test]
    fn trailing_period_detaches_from_number() {
        assert_eq!(toks("bs was 68."), ["bs", "was", "68", "."]);
    }

    #[test]
    fn crop_boundaries() {
        let forty_one: Vec<String> = (0..41).map(|i| i.to_string()).collect();
        let cropped = crop_tokens(forty_one.clone());
        assert_eq!(cropped.len(), 40);
        assert_eq!(cropped[..], forty_one[..40]);

        let forty: Vec<String> = (0..40).map(|i| i.to_string()).collect();
        assert_eq!(crop_tokens(forty.clone()), forty);

        let two = vec!["a".to_string(), "b".to_string()];
        assert_eq!(crop_tokens(two.clone()), two);
    }

    #[test]
    fn deterministic() {
        let s = "Glucose 68 mg/dL at 3 a.m.";
        assert_eq!(toks(s), toks(s));
    }
}
