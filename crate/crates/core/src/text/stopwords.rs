//! Fixed stopword list for the bag-of-words baseline. Versioned so model
//! files can state exactly which list produced their features.

pub const STOPWORDS_VERSION: &str = "1";

/// Common English function words (~120). Deliberately free of clinical
/// vocabulary: "low", "high", "no" and negations are all content-bearing
/// for this task and stay in.
pub const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "all", "am", "an", "and", "any", "are", "as", "at",
    "be", "because", "been", "before", "being", "below", "between", "both", "but", "by", "came",
    "can", "come", "could", "did", "do", "does", "doing", "during", "each", "few", "for", "from",
    "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself", "him",
    "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "me",
    "more", "most", "my", "myself", "of", "off", "on", "once", "only", "or", "other", "our",
    "ours", "ourselves", "out", "over", "own", "same", "she", "should", "so", "some", "such",
    "than", "that", "the", "their", "theirs", "them", "themselves", "then", "there", "these",
    "they", "this", "those", "through", "to", "too", "under", "until", "up", "very", "was", "we",
    "were", "what", "when", "where", "which", "while", "who", "whom", "why", "will", "with",
    "would", "you", "your", "yours", "yourself", "yourselves",
];

pub fn is_stopword(token: &str) -> bool {
    STOPWORDS.binary_search(&token).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_is_sorted_for_binary_search() {
        let mut sorted = STOPWORDS.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, STOPWORDS);
    }

    #[test]
    fn membership() {
        assert!(is_stopword("the"));
        assert!(is_stopword("is"));
        assert!(!is_stopword("low"));
        assert!(!is_stopword("bs"));
        assert!(!is_stopword("not"));
    }

    #[test]
    fn roughly_one_hundred_twenty() {
        assert!(STOPWORDS.len() >= 110 && STOPWORDS.len() <= 130);
    }
}
