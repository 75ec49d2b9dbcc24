//! Template inventory for the synthetic corpus.
//!
//! Positive trigger synonyms are (glucose-word, low-word) phrase pairs:
//! the pair is the synonym, so a held-out synonym like "bs tanked" can be
//! absent from training notes as a phrase while both of its component
//! tokens still occur there in other contexts (benign templates below put
//! every low-word into non-glucose training sentences). Bag-of-words
//! models therefore see nothing new to latch onto, while encoders that
//! read order and clustered embeddings can generalize to unseen pairs.
//!
//! Glucose/low adjacency appears only in positive templates; negatives may
//! contain both word families but never adjacent.

use serde::{Deserialize, Serialize};

pub const GLUCOSE_WORDS: &[&str] = &["bs", "sugar", "glucose", "bg", "fsbs", "gluc"];
pub const LOW_WORDS: &[&str] = &[
    "low", "dropped", "crashed", "dipped", "tanked", "bottomed", "plummeted", "sank",
];
pub const HIGH_WORDS: &[&str] = &["high", "elevated", "spiked", "rising"];
pub const STABLE_WORDS: &[&str] = &["stable", "controlled", "steady", "acceptable"];
pub const SYMPTOM_WORDS: &[&str] = &[
    "shaky", "sweaty", "diaphoretic", "tremulous", "clammy", "lightheaded",
];
pub const TREATMENT_WORDS: &[&str] = &["juice", "crackers", "dextrose", "d50", "glucagon"];
pub const HYPO_WORDS: &[&str] = &["hypoglycemia", "hypoglycemic"];

/// Concept clusters for the generated embeddings: members of a cluster get
/// vectors with high mutual cosine, distinct clusters stay near-orthogonal.
pub fn concept_clusters() -> Vec<(&'static str, &'static [&'static str])> {
    vec![
        ("glucose", GLUCOSE_WORDS),
        ("low", LOW_WORDS),
        ("high", HIGH_WORDS),
        ("stable", STABLE_WORDS),
        ("symptom", SYMPTOM_WORDS),
        ("treatment", TREATMENT_WORDS),
        ("hypo", HYPO_WORDS),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentenceClass {
    PositiveLexical,
    PositiveNumeric,
    NegativeNearMiss,
    NegativeBenign,
    NegativeNumeric,
    NegativeFiller,
}

impl SentenceClass {
    pub fn label(self) -> u8 {
        matches!(self, SentenceClass::PositiveLexical | SentenceClass::PositiveNumeric) as u8
    }
}

/// Positive templates built around a (glucose, low) pair. `{g}`/`{l}` are
/// the pair slots; other slots draw from their clusters.
pub const PAIR_TEMPLATES: &[(&str, &str)] = &[
    ("pl0", "{g} {l} this morning"),
    ("pl1", "pt noted {g} {l} overnight"),
    ("pl2", "{g} {l} , gave {treat}"),
    ("pl3", "felt {sympt} and {sympt2} , {g} {l}"),
    ("pl4", "she has low {g} level"),
    ("pl5", "{g} {l} again despite evening snack"),
];

/// Positive templates around a hypoglycemia word; never held out.
pub const HYPO_TEMPLATES: &[(&str, &str)] = &[
    ("ph0", "{hypo} episode overnight"),
    ("ph1", "episode of {hypo} with {sympt}"),
    ("ph2", "pt treated for {hypo} , gave {treat}"),
];

/// Numeric templates; the same surface contexts serve positives and
/// negatives, so only the value decides the label.
pub const NUMERIC_TEMPLATES: &[(&str, &str)] = &[
    ("num0", "{g} is {v}"),
    ("num1", "{g} {v} this am"),
    ("num2", "{g} noted to be {v}"),
    ("num3", "{g} {v} mg/dl at breakfast"),
    ("num4", "repeat {g} was {v}"),
];

/// Near-miss negatives: glucose words in non-hypoglycemic statements.
pub const NEAR_MISS_TEMPLATES: &[(&str, &str)] = &[
    ("nn0", "{g} {stable} this morning"),
    ("nn1", "pt noted {g} {stable} overnight"),
    ("nn2", "{g} {high} after lunch"),
    ("nn3", "{g} checked before meals"),
    ("nn4", "{g} well {stable} on current regimen"),
    ("nn5", "she has {stable} {g} level"),
];

/// Benign negatives that place low-words in non-glucose contexts (keeping
/// every low-word inside the training vocabulary) and treatment/symptom
/// words in neutral ones.
pub const BENIGN_TEMPLATES: &[(&str, &str)] = &[
    ("nb0", "pressure {l} during dialysis"),
    ("nb1", "mood {l} since admission"),
    ("nb2", "sodium {l} slightly on labs"),
    ("nb3", "platelets {l} after chemo"),
    ("nt0", "{treat} given with breakfast"),
    ("nt1", "pt requested {treat} with lunch"),
    ("nt2", "{sympt} attributed to anxiety"),
    ("nt3", "chronic {sympt} reported , neuro consulted"),
];

/// Clinical filler fragments; concatenated and trimmed to a target length.
/// A few reuse stable/low words in clearly non-glycemic contexts so those
/// unigrams stay class-balanced.
pub const FILLER_FRAGMENTS: &[&str] = &[
    "continue metformin 500 daily",
    "follow up in clinic next week",
    "patient resting comfortably",
    "no acute distress noted",
    "lungs clear bilaterally",
    "plan unchanged today",
    "reviewed medication list with nursing",
    "family at bedside",
    "denies chest pain or palpitations",
    "ambulating without assistance",
    "diet advanced as tolerated",
    "wound healing well",
    "scheduled for imaging tomorrow",
    "continue current insulin regimen",
    "renal function stable",
    "vitals stable overnight",
    "pain low this morning",
    "appetite fair at dinner",
    "encouraged oral fluids",
    "awaiting physical therapy evaluation",
    "social work consulted for discharge planning",
    "telemetry without events",
    "electrolyte panel pending",
    "skin warm and dry",
    "neuro checks unremarkable",
    "cont home medications",
    "labs reviewed with team",
    "daily weights ordered",
    "foley removed this morning",
    "tolerating regular diet",
    "will reassess in the afternoon",
    "heart rate regular",
    "no new complaints voiced",
    "dressing changed at noon",
    "blood pressure well controlled",
];

/// Every literal (non-slot) word used by the templates and fragments, for
/// building the embedding file's vocabulary.
pub fn template_literal_words() -> Vec<String> {
    let mut words = std::collections::BTreeSet::new();
    let mut add_pattern = |pattern: &str| {
        for token in pattern.split_whitespace() {
            if token.starts_with('{') || token == "," {
                continue;
            }
            for piece in token.split('/') {
                let clean: String = piece.chars().filter(|c| c.is_alphanumeric()).collect();
                if !clean.is_empty() && !clean.chars().all(|c| c.is_ascii_digit()) {
                    words.insert(clean.to_lowercase());
                }
            }
        }
    };
    for (_, p) in PAIR_TEMPLATES
        .iter()
        .chain(HYPO_TEMPLATES)
        .chain(NUMERIC_TEMPLATES)
        .chain(NEAR_MISS_TEMPLATES)
        .chain(BENIGN_TEMPLATES)
    {
        add_pattern(p);
    }
    for fragment in FILLER_FRAGMENTS {
        add_pattern(fragment);
    }
    words.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clusters_are_disjoint() {
        let mut seen = std::collections::HashSet::new();
        for (_, members) in concept_clusters() {
            for &m in members {
                assert!(seen.insert(m), "{m} appears in two clusters");
            }
        }
    }

    #[test]
    fn literal_words_exclude_slots_and_numbers() {
        let words = template_literal_words();
        assert!(words.iter().all(|w| !w.contains('{')));
        assert!(!words.contains(&"500".to_string()));
        assert!(words.contains(&"pressure".to_string()));
        assert!(words.contains(&"mg".to_string()));
    }

    #[test]
    fn labels_follow_class() {
        assert_eq!(SentenceClass::PositiveLexical.label(), 1);
        assert_eq!(SentenceClass::PositiveNumeric.label(), 1);
        assert_eq!(SentenceClass::NegativeFiller.label(), 0);
    }
}
