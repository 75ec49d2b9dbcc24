//! Numeric blood-glucose normalization.
//!
//! Bare numbers carry no magnitude information an embedding can order, so
//! sentences like "bs is 62" defeat lexical models. This optional pipeline
//! stage finds numeric glucose mentions, infers the unit from the order of
//! magnitude when none is written, and rewrites the number as a comparator
//! token relative to the hypoglycemia alert threshold.
//!
//! It is off by default; enable it with `--normalize-glucose`.

use serde::{Deserialize, Serialize};

/// Glucose unit of a numeric mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GlucoseUnit {
    MgPerDl,
    MmolPerL,
}

/// A detected (trigger, number) pair inside a tokenized sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct GlucoseMention {
    pub trigger: String,
    pub trigger_index: usize,
    pub value_index: usize,
    pub value: f64,
    /// Unit written out next to the number, if any.
    pub explicit_unit: Option<GlucoseUnit>,
}

#[derive(Debug, Clone)]
pub struct NormalizerConfig {
    /// Hypoglycemia alert level in mg/dL.
    pub threshold_mg_dl: f64,
    /// Values below this are read as mmol/L when the unit is absent;
    /// plasma glucose in mmol/L is physiologically below this cutoff, while
    /// mg/dL values under it are rare.
    pub unit_cutoff: f64,
    /// Largest number of tokens allowed between trigger and number.
    pub max_gap: usize,
}

impl Default for NormalizerConfig {
    fn default() -> Self {
        NormalizerConfig {
            threshold_mg_dl: 70.0,
            unit_cutoff: 40.0,
            max_gap: 3,
        }
    }
}

pub const LOW_TOKEN: &str = "glucose_low";
pub const NOT_LOW_TOKEN: &str = "glucose_not_low";

const TRIGGERS: &[&str] = &["bs", "fsbs", "bg", "fs", "glucose", "gluc", "sugar", "sugars"];

pub const MMOL_TO_MG: f64 = 18.016;

fn parse_number(token: &str) -> Option<f64> {
    if token.is_empty() || !token.chars().all(|c| c.is_ascii_digit() || c == '.') {
        return None;
    }
    if !token.chars().next()?.is_ascii_digit() {
        return None;
    }
    token.parse::<f64>().ok().filter(|v| *v > 0.0)
}

/// Find (trigger, number) pairs: for each trigger token, the first numeric
/// token within `max_gap` intervening tokens after it. An adjacent written
/// unit ("mg", "mmol") is attached when present.
pub fn detect_numeric_glucose(tokens: &[String], config: &NormalizerConfig) -> Vec<GlucoseMention> {
    let mut mentions = Vec::new();
    let mut claimed = vec![false; tokens.len()];
    for (i, token) in tokens.iter().enumerate() {
        if !TRIGGERS.contains(&token.as_str()) {
            continue;
        }
        let window_end = (i + config.max_gap + 2).min(tokens.len());
        for j in i + 1..window_end {
            if claimed[j] {
                continue;
            }
            if let Some(value) = parse_number(&tokens[j]) {
                claimed[j] = true;
                mentions.push(GlucoseMention {
                    trigger: token.clone(),
                    trigger_index: i,
                    value_index: j,
                    value,
                    explicit_unit: explicit_unit_after(tokens, j),
                });
                break;
            }
        }
    }
    mentions
}

fn explicit_unit_after(tokens: &[String], value_index: usize) -> Option<GlucoseUnit> {
    match tokens.get(value_index + 1).map(|t| t.as_str()) {
        Some("mg") => Some(GlucoseUnit::MgPerDl),
        Some("mmol") => Some(GlucoseUnit::MmolPerL),
        _ => None,
    }
}

/// Infer the unit from the order of magnitude of a bare value.
pub fn infer_unit(value: f64, config: &NormalizerConfig) -> GlucoseUnit {
    if value < config.unit_cutoff {
        GlucoseUnit::MmolPerL
    } else {
        GlucoseUnit::MgPerDl
    }
}

/// The comparator token a mention rewrites to.
pub fn comparator_token(mention: &GlucoseMention, config: &NormalizerConfig) -> &'static str {
    let unit = mention
        .explicit_unit
        .unwrap_or_else(|| infer_unit(mention.value, config));
    let mg = match unit {
        GlucoseUnit::MgPerDl => mention.value,
        GlucoseUnit::MmolPerL => mention.value * MMOL_TO_MG,
    };
    if mg < config.threshold_mg_dl {
        LOW_TOKEN
    } else {
        NOT_LOW_TOKEN
    }
}

/// Replace every detected numeric token with its comparator token. Token
/// count is preserved and the pass is idempotent: comparator tokens are not
/// numbers, so a second pass detects nothing.
pub fn normalize_sentence(tokens: &[String], config: &NormalizerConfig) -> Vec<String> {
    let mentions = detect_numeric_glucose(tokens, config);
    let mut out = tokens.to_vec();
    for mention in &mentions {
        out[mention.value_index] = comparator_token(mention, config).to_string();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn cfg() -> NormalizerConfig {
        NormalizerConfig::default()
    }

    #[test]
    fn detects_adjacent_value() {
        let m = detect_numeric_glucose(&toks(&["bs", "is", "68"]), &cfg());
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].trigger, "bs");
        assert_eq!(m[0].value, 68.0);
        assert_eq!(m[0].explicit_unit, None);
    }

    #[test]
    fn detects_across_gap() {
        // Three intervening tokens is still inside the window.
        let m = detect_numeric_glucose(&toks(&["fsbs", "noted", "to", "be", "9"]), &cfg());
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].value, 9.0);
    }

    #[test]
    fn no_trigger_no_mention() {
        let m = detect_numeric_glucose(&toks(&["patient", "ate", "68", "crackers"]), &cfg());
        assert!(m.is_empty());
    }

    #[test]
    fn explicit_unit_attaches() {
        let m = detect_numeric_glucose(&toks(&["bs", "25", "mg", "dl"]), &cfg());
        assert_eq!(m[0].explicit_unit, Some(GlucoseUnit::MgPerDl));
        // 25 mg/dL is below threshold even though bare 25 would read as mmol.
        assert_eq!(comparator_token(&m[0], &cfg()), LOW_TOKEN);
    }

    #[test]
    fn unit_inference_magnitude_rule() {
        assert_eq!(infer_unit(68.0, &cfg()), GlucoseUnit::MgPerDl);
        assert_eq!(infer_unit(3.2, &cfg()), GlucoseUnit::MmolPerL);
        assert_eq!(infer_unit(40.0, &cfg()), GlucoseUnit::MgPerDl); // boundary pinned
    }

    #[test]
    fn comparator_cases() {
        let mention = |value: f64| GlucoseMention {
            trigger: "bs".into(),
            trigger_index: 0,
            value_index: 2,
            value,
            explicit_unit: None,
        };
        assert_eq!(comparator_token(&mention(68.0), &cfg()), LOW_TOKEN);
        // 3.0 mmol -> 54.05 mg/dL -> low
        assert_eq!(comparator_token(&mention(3.0), &cfg()), LOW_TOKEN);
        assert_eq!(comparator_token(&mention(120.0), &cfg()), NOT_LOW_TOKEN);
    }

    #[test]
    fn normalization_preserves_count_and_is_idempotent() {
        let tokens = toks(&["bs", "is", "62", "this", "am"]);
        let once = normalize_sentence(&tokens, &cfg());
        assert_eq!(once.len(), tokens.len());
        assert_eq!(once[2], LOW_TOKEN);
        let twice = normalize_sentence(&once, &cfg());
        assert_eq!(once, twice);
    }

    #[test]
    fn multiple_mentions() {
        let tokens = toks(&["bs", "62", "then", "glucose", "140", "later"]);
        let out = normalize_sentence(&tokens, &cfg());
        assert_eq!(out[1], LOW_TOKEN);
        assert_eq!(out[4], NOT_LOW_TOKEN);
    }
}
