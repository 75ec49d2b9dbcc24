//! Corpus generation: one seeded stream, note by note, sentence by
//! sentence.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use crate::error::{Error, Result};
use crate::synth::embeddings::synth_embedding_entries;
use crate::synth::templates::*;
use crate::synth::{SentenceMeta, SynthManifest, SynthSpec, TemplateInfo};
use crate::text::SentenceRow;

/// Probability that a positive in a designated test note uses a held-out
/// trigger pair.
const HOLDOUT_USE_RATE: f64 = 0.6;
/// Positive lexical sentences using a hypo-word template instead of a pair.
const HYPO_TEMPLATE_RATE: f64 = 0.25;
/// Negative mixture (the remainder is filler).
const NEAR_MISS_RATE: f64 = 0.030;
const BENIGN_RATE: f64 = 0.024;
const NUMERIC_NEGATIVE_RATE: f64 = 0.006;

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub rows: Vec<SentenceRow>,
    pub embedding_entries: Vec<(String, Vec<f64>)>,
    pub manifest: SynthManifest,
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &'a [&'a str]) -> &'a str {
    items[rng.gen_range(0..items.len())]
}

/// All (glucose, low) pairs in a fixed enumeration order.
fn all_pairs() -> Vec<(String, String)> {
    let mut pairs = Vec::new();
    for &g in GLUCOSE_WORDS {
        for &l in LOW_WORDS {
            pairs.push((g.to_string(), l.to_string()));
        }
    }
    pairs
}

struct ValueSpec {
    text: String,
}

/// Numeric glucose values. Positives stay below the 70 mg/dL alert level
/// after unit inference (bare mg values start at 40 so the magnitude rule
/// reads them as mg/dL; 20-39 mg/dL appears only with a written unit);
/// negatives are 90+ mg/dL or a clearly normal-to-high mmol value.
fn numeric_value(rng: &mut ChaCha8Rng, positive: bool, explicit_unit: bool) -> ValueSpec {
    let text = if positive {
        if explicit_unit {
            format!("{}", rng.gen_range(20..=69))
        } else if rng.gen_bool(0.5) {
            format!("{}", rng.gen_range(40..=69))
        } else {
            format!("{:.1}", rng.gen_range(10..=38) as f64 / 10.0)
        }
    } else if explicit_unit {
        format!("{}", rng.gen_range(90..=400))
    } else if rng.gen_bool(0.5) {
        format!("{}", rng.gen_range(90..=400))
    } else {
        format!("{:.1}", rng.gen_range(50..=120) as f64 / 10.0)
    };
    ValueSpec { text }
}

fn instantiate(
    rng: &mut ChaCha8Rng,
    pattern: &str,
    pair: Option<&(String, String)>,
    value: Option<&str>,
) -> String {
    let sympt1 = pick(rng, SYMPTOM_WORDS);
    let mut sympt2 = pick(rng, SYMPTOM_WORDS);
    while sympt2 == sympt1 {
        sympt2 = pick(rng, SYMPTOM_WORDS);
    }
    let mut out = pattern.to_string();
    if let Some((g, l)) = pair {
        out = out.replace("{g}", g).replace("{l}", l);
    } else {
        // Numeric and near-miss templates draw a fresh glucose word; benign
        // templates draw a fresh low word.
        out = out
            .replace("{g}", pick(rng, GLUCOSE_WORDS))
            .replace("{l}", pick(rng, LOW_WORDS));
    }
    if let Some(v) = value {
        out = out.replace("{v}", v);
    }
    out.replace("{hypo}", pick(rng, HYPO_WORDS))
        .replace("{treat}", pick(rng, TREATMENT_WORDS))
        .replace("{sympt2}", sympt2)
        .replace("{sympt}", sympt1)
        .replace("{stable}", pick(rng, STABLE_WORDS))
        .replace("{high}", pick(rng, HIGH_WORDS))
}

fn filler_sentence(rng: &mut ChaCha8Rng, target_len: usize) -> String {
    let mut tokens: Vec<&str> = Vec::with_capacity(target_len);
    while tokens.len() < target_len {
        let fragment = FILLER_FRAGMENTS[rng.gen_range(0..FILLER_FRAGMENTS.len())];
        tokens.extend(fragment.split_whitespace());
    }
    tokens.truncate(target_len.max(2));
    tokens.join(" ")
}

fn template_catalog() -> Vec<TemplateInfo> {
    let mut templates = Vec::new();
    let mut push = |id: &str, class: SentenceClass, pattern: &str| {
        templates.push(TemplateInfo {
            id: id.to_string(),
            class,
            pattern: pattern.to_string(),
        });
    };
    for (id, p) in PAIR_TEMPLATES {
        push(id, SentenceClass::PositiveLexical, p);
    }
    for (id, p) in HYPO_TEMPLATES {
        push(id, SentenceClass::PositiveLexical, p);
    }
    for (id, p) in NUMERIC_TEMPLATES {
        push(&format!("{id}+"), SentenceClass::PositiveNumeric, p);
        push(&format!("{id}-"), SentenceClass::NegativeNumeric, p);
    }
    for (id, p) in NEAR_MISS_TEMPLATES {
        push(id, SentenceClass::NegativeNearMiss, p);
    }
    for (id, p) in BENIGN_TEMPLATES {
        push(id, SentenceClass::NegativeBenign, p);
    }
    push("filler", SentenceClass::NegativeFiller, "<fragments>");
    templates
}

/// Generate the corpus, the matching embedding file entries, and the
/// manifest. Byte-identical output for identical specs.
pub fn generate_corpus(spec: &SynthSpec) -> Result<SynthCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // Holdout partition over trigger pairs, keyed by the low-word: a pair
    // is held out iff its low-word is, so no held-out low-word ever occurs
    // in a training positive and bag-of-words models get no unigram route
    // to the held-out synonyms. "low" itself is never held out (one
    // template hardcodes it for the canonical phrasing).
    let mut low_pool: Vec<&str> = LOW_WORDS[1..].to_vec();
    low_pool.shuffle(&mut rng);
    let n_holdout_lows = ((spec.synonym_holdout_fraction * LOW_WORDS.len() as f64).round()
        as usize)
        .min(low_pool.len());
    let holdout_lows: std::collections::HashSet<&str> =
        low_pool.into_iter().take(n_holdout_lows).collect();
    let (holdout_pairs, training_pairs): (Vec<_>, Vec<_>) = all_pairs()
        .into_iter()
        .partition(|(_, l)| holdout_lows.contains(l.as_str()));
    if spec.positive_rate > 0.0 && training_pairs.is_empty() {
        return Err(Error::Usage(
            "synonym_holdout_fraction leaves no training trigger pairs".into(),
        ));
    }

    // Designated test notes: an exact fraction, chosen up front.
    let mut note_order: Vec<usize> = (0..spec.n_notes).collect();
    note_order.shuffle(&mut rng);
    let n_test_notes = (spec.test_note_fraction * spec.n_notes as f64).round() as usize;
    let test_notes: std::collections::HashSet<usize> =
        note_order.into_iter().take(n_test_notes).collect();

    let per_note = Normal::new(spec.sentences_per_note_mean, spec.sentences_per_note_sd)
        .map_err(|e| Error::Usage(format!("bad note distribution: {e}")))?;
    // Log-normal length model: heavy right tail like real notes. The mean
    // is nudged above the target because positives and near-miss templates
    // run short.
    let len_sigma = 0.8f64;
    let len_mu = (spec.sentence_len_mean * 1.04).ln() - len_sigma * len_sigma / 2.0;
    let len_dist = LogNormal::new(len_mu, len_sigma)
        .map_err(|e| Error::Usage(format!("bad length distribution: {e}")))?;

    let mut rows = Vec::new();
    let mut metas = Vec::new();
    let mut test_note_ids = Vec::new();

    for note in 0..spec.n_notes {
        let note_id = format!("note-{note:04}");
        let is_test = test_notes.contains(&note);
        if is_test {
            test_note_ids.push(note_id.clone());
        }
        let n_sentences = (per_note.sample(&mut rng).round() as i64)
            .clamp(spec.sentences_per_note_min as i64, spec.sentences_per_note_max as i64)
            as usize;
        for s in 0..n_sentences {
            let positive = spec.positive_rate > 0.0 && rng.gen_bool(spec.positive_rate);
            let (text, template_id, class, holdout) = if positive {
                if rng.gen_bool(spec.numeric_case_fraction) {
                    let (id, pattern) =
                        NUMERIC_TEMPLATES[rng.gen_range(0..NUMERIC_TEMPLATES.len())];
                    let explicit = pattern.contains("mg/dl");
                    let value = numeric_value(&mut rng, true, explicit);
                    let text = instantiate(&mut rng, pattern, None, Some(&value.text));
                    (text, format!("{id}+"), SentenceClass::PositiveNumeric, false)
                } else if rng.gen_bool(HYPO_TEMPLATE_RATE) {
                    let (id, pattern) = HYPO_TEMPLATES[rng.gen_range(0..HYPO_TEMPLATES.len())];
                    let text = instantiate(&mut rng, pattern, None, None);
                    (text, id.to_string(), SentenceClass::PositiveLexical, false)
                } else {
                    let use_holdout =
                        is_test && !holdout_pairs.is_empty() && rng.gen_bool(HOLDOUT_USE_RATE);
                    let pool = if use_holdout { &holdout_pairs } else { &training_pairs };
                    let pair = &pool[rng.gen_range(0..pool.len())];
                    let (id, pattern) = PAIR_TEMPLATES[rng.gen_range(0..PAIR_TEMPLATES.len())];
                    let text = instantiate(&mut rng, pattern, Some(pair), None);
                    // pl4 has no {l} slot, so it never carries a holdout pair.
                    let carries_pair = pattern.contains("{l}");
                    (
                        text,
                        id.to_string(),
                        SentenceClass::PositiveLexical,
                        use_holdout && carries_pair,
                    )
                }
            } else {
                let roll: f64 = rng.gen_range(0.0..1.0);
                if roll < NEAR_MISS_RATE {
                    let (id, pattern) =
                        NEAR_MISS_TEMPLATES[rng.gen_range(0..NEAR_MISS_TEMPLATES.len())];
                    let text = instantiate(&mut rng, pattern, None, None);
                    (text, id.to_string(), SentenceClass::NegativeNearMiss, false)
                } else if roll < NEAR_MISS_RATE + BENIGN_RATE {
                    let (id, pattern) = BENIGN_TEMPLATES[rng.gen_range(0..BENIGN_TEMPLATES.len())];
                    let text = instantiate(&mut rng, pattern, None, None);
                    (text, id.to_string(), SentenceClass::NegativeBenign, false)
                } else if roll < NEAR_MISS_RATE + BENIGN_RATE + NUMERIC_NEGATIVE_RATE {
                    let (id, pattern) =
                        NUMERIC_TEMPLATES[rng.gen_range(0..NUMERIC_TEMPLATES.len())];
                    let explicit = pattern.contains("mg/dl");
                    let value = numeric_value(&mut rng, false, explicit);
                    let text = instantiate(&mut rng, pattern, None, Some(&value.text));
                    (text, format!("{id}-"), SentenceClass::NegativeNumeric, false)
                } else {
                    let target = (len_dist.sample(&mut rng).round() as i64)
                        .clamp(spec.sentence_len_min as i64, spec.sentence_len_max as i64)
                        as usize;
                    let text = filler_sentence(&mut rng, target);
                    (text, "filler".to_string(), SentenceClass::NegativeFiller, false)
                }
            };
            rows.push(SentenceRow {
                note_id: note_id.clone(),
                sentence_index: s as u32,
                text,
                label: class.label(),
            });
            metas.push(SentenceMeta {
                note_id: note_id.clone(),
                sentence_index: s as u32,
                template_id,
                class,
                holdout,
            });
        }
    }

    let holdout_synonyms: Vec<String> = holdout_pairs
        .iter()
        .map(|(g, l)| format!("{g} {l}"))
        .collect();
    scan_holdout_leakage(&rows, &metas, &holdout_synonyms, &test_note_ids)?;

    let embedding_entries = synth_embedding_entries(spec.seed ^ 0x5eed_e4b3)?;

    let manifest = SynthManifest {
        spec: spec.clone(),
        templates: template_catalog(),
        holdout_synonyms,
        test_note_ids,
        sentences: metas,
    };
    Ok(SynthCorpus {
        rows,
        embedding_entries,
        manifest,
    })
}

/// Scan for held-out trigger phrases outside the designated test notes.
/// Matches whole adjacent tokens, not raw substrings ("fsbs low" must not
/// count as containing "bs low").
fn scan_holdout_leakage(
    rows: &[SentenceRow],
    metas: &[SentenceMeta],
    holdout_synonyms: &[String],
    test_note_ids: &[String],
) -> Result<()> {
    let test: std::collections::HashSet<&str> =
        test_note_ids.iter().map(|s| s.as_str()).collect();
    let phrases: Vec<Vec<&str>> = holdout_synonyms
        .iter()
        .map(|p| p.split_whitespace().collect())
        .collect();
    for (row, meta) in rows.iter().zip(metas) {
        debug_assert_eq!(row.note_id, meta.note_id);
        if test.contains(row.note_id.as_str()) {
            continue;
        }
        let tokens: Vec<&str> = row.text.split_whitespace().collect();
        for (phrase, raw) in phrases.iter().zip(holdout_synonyms) {
            if tokens.windows(phrase.len()).any(|w| w == &phrase[..]) {
                return Err(Error::Data(format!(
                    "holdout phrase {raw:?} leaked into non-test note {}",
                    row.note_id
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    fn small_spec() -> SynthSpec {
        SynthSpec {
            n_notes: 40,
            sentences_per_note_mean: 50.0,
            sentences_per_note_sd: 10.0,
            sentences_per_note_min: 6,
            sentences_per_note_max: 120,
            seed: 7,
            ..SynthSpec::default()
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_corpus(&small_spec()).unwrap();
        let b = generate_corpus(&small_spec()).unwrap();
        assert_eq!(a.rows, b.rows);
        let mut other = small_spec();
        other.seed = 8;
        let c = generate_corpus(&other).unwrap();
        assert_ne!(a.rows, c.rows);
    }

    #[test]
    fn positive_share_near_target() {
        let corpus = generate_corpus(&small_spec()).unwrap();
        let n = corpus.rows.len() as f64;
        let pos = corpus.rows.iter().filter(|r| r.label == 1).count() as f64;
        let share = pos / n;
        assert!(
            (0.02..=0.04).contains(&share),
            "positive share {share} out of range over {n} sentences"
        );
    }

    #[test]
    fn zero_positive_rate_gives_all_negative() {
        let spec = SynthSpec {
            positive_rate: 0.0,
            ..small_spec()
        };
        let corpus = generate_corpus(&spec).unwrap();
        assert!(corpus.rows.iter().all(|r| r.label == 0));
    }

    #[test]
    fn labels_match_manifest_oracle() {
        let corpus = generate_corpus(&small_spec()).unwrap();
        for (row, meta) in corpus.rows.iter().zip(&corpus.manifest.sentences) {
            assert_eq!(row.label, corpus.manifest.expected_label(meta));
            assert_eq!(row.note_id, meta.note_id);
            assert_eq!(row.sentence_index, meta.sentence_index);
        }
    }

    #[test]
    fn lengths_within_bounds_and_mean_close() {
        let spec = SynthSpec {
            n_notes: 120,
            sentences_per_note_mean: 120.0,
            sentences_per_note_sd: 30.0,
            ..small_spec()
        };
        let corpus = generate_corpus(&spec).unwrap();
        let lens: Vec<usize> = corpus.rows.iter().map(|r| tokenize(&r.text).len()).collect();
        assert!(lens.len() >= 10_000, "need a large sample, got {}", lens.len());
        assert!(lens.iter().all(|&l| l >= 1 && l <= spec.sentence_len_max));
        let mean = lens.iter().sum::<usize>() as f64 / lens.len() as f64;
        let target = spec.sentence_len_mean;
        assert!(
            (mean - target).abs() / target <= 0.10,
            "pre-crop mean {mean} not within 10% of {target}"
        );
    }

    #[test]
    fn holdout_phrases_only_in_test_notes() {
        let corpus = generate_corpus(&small_spec()).unwrap();
        assert!(!corpus.manifest.holdout_synonyms.is_empty());
        assert!(!corpus.manifest.test_note_ids.is_empty());
        // The generator scans internally; re-scan here as a test oracle.
        scan_holdout_leakage(
            &corpus.rows,
            &corpus.manifest.sentences,
            &corpus.manifest.holdout_synonyms,
            &corpus.manifest.test_note_ids,
        )
        .unwrap();
        // And holdout-marked sentences exist in test notes.
        assert!(corpus.manifest.sentences.iter().any(|m| m.holdout));
    }

    #[test]
    fn numeric_templates_tokenize_with_detectable_values() {
        let corpus = generate_corpus(&small_spec()).unwrap();
        let cfg = crate::glucose::NormalizerConfig::default();
        for (row, meta) in corpus.rows.iter().zip(&corpus.manifest.sentences) {
            if !matches!(
                meta.class,
                SentenceClass::PositiveNumeric | SentenceClass::NegativeNumeric
            ) {
                continue;
            }
            let tokens = tokenize(&row.text);
            let mentions = crate::glucose::detect_numeric_glucose(&tokens, &cfg);
            assert!(
                !mentions.is_empty(),
                "numeric sentence not detected: {:?}",
                row.text
            );
            let expected = if meta.class == SentenceClass::PositiveNumeric {
                crate::glucose::LOW_TOKEN
            } else {
                crate::glucose::NOT_LOW_TOKEN
            };
            let normalized = crate::glucose::normalize_sentence(&tokens, &cfg);
            assert!(
                normalized.iter().any(|t| t == expected),
                "expected {expected} in {normalized:?}"
            );
        }
    }
}
