//! Rule-based sentence splitter.
//!
//! Terminal punctuation (`.`, `!`, `?`) followed by whitespace ends a
//! sentence, with an abbreviation allowlist in two tiers:
//!
//! * title abbreviations ("dr.", "mr.", ...) never end a sentence — they
//!   precede proper names;
//! * general abbreviations ("mg.", "a.m.", "vs.", and bare initials) end a
//!   sentence only when the next word starts with an uppercase letter or a
//!   digit.
//!
//! Periods not followed by whitespace (decimals, the inner dots of
//! "a.m.") are never split points. A blank line always ends a sentence.
//! The splitter is intentionally self-contained; swap in something smarter
//! behind the same signature if the corpus needs it.

const TITLE_ABBREVIATIONS: &[&str] = &["dr.", "mr.", "mrs.", "ms.", "prof.", "st."];

const GENERAL_ABBREVIATIONS: &[&str] = &[
    "a.m.", "p.m.", "mg.", "ml.", "dl.", "kg.", "mcg.", "oz.", "vs.", "e.g.", "i.e.", "etc.",
    "approx.", "q.d.", "b.i.d.", "t.i.d.", "p.r.n.", "neg.", "pos.",
];

/// Split a note body into trimmed sentence strings, order preserved.
/// Everything that is not whitespace ends up in exactly one sentence.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;

    let push = |from: usize, to: usize, out: &mut Vec<String>| {
        let s: String = chars[from..to].iter().collect();
        let s = s.trim();
        if !s.is_empty() {
            out.push(s.to_string());
        }
    };

    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let at_boundary = next.map_or(true, |n| n.is_whitespace());

        let split_here = match c {
            '!' | '?' => at_boundary,
            '.' => at_boundary && period_ends_sentence(&chars, i),
            '\n' => {
                // Blank line: hard boundary regardless of punctuation.
                let mut j = i + 1;
                while j < chars.len() && chars[j] != '\n' && chars[j].is_whitespace() {
                    j += 1;
                }
                j < chars.len() && chars[j] == '\n'
            }
            _ => false,
        };

        if split_here {
            push(start, i + 1, &mut sentences);
            start = i + 1;
        }
        i += 1;
    }
    push(start, chars.len(), &mut sentences);
    sentences
}

fn period_ends_sentence(chars: &[char], dot: usize) -> bool {
    // The word ending at this period, lowercased, period included.
    let mut w = dot;
    while w > 0 && !chars[w - 1].is_whitespace() {
        w -= 1;
    }
    let word: String = chars[w..=dot].iter().collect::<String>().to_lowercase();

    if TITLE_ABBREVIATIONS.contains(&word.as_str()) {
        return false;
    }

    let bare_initial = word.len() == 2 && word.chars().next().is_some_and(|c| c.is_alphabetic());
    let general = bare_initial || GENERAL_ABBREVIATIONS.contains(&word.as_str());
    if !general {
        return true;
    }

    // Abbreviation followed by a capitalized word or a digit: the period is
    // doing double duty and still closes the sentence.
    let mut j = dot + 1;
    while j < chars.len() && chars[j].is_whitespace() {
        j += 1;
    }
    match chars.get(j) {
        Some(c) => c.is_uppercase() || c.is_ascii_digit(),
        None => true,
    }
}
