//! Gloss tokens and the post-processing applied to raw translator output.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::resolve::VideoManifest;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlossError {
    #[error("token `{raw}` contains characters outside [A-Z0-9-] after cleanup (`{cleaned}`)")]
    CharsetViolation { raw: String, cleaned: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlossKind {
    Plain,
    Fingerspelling,
}

/// One uppercase gloss token matching `[A-Z0-9]+(-[A-Z0-9]+)*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Gloss {
    token: String,
    kind: GlossKind,
}

pub fn is_valid_token(token: &str) -> bool {
    !token.is_empty()
        && token
            .split('-')
            .all(|seg| !seg.is_empty() && seg.bytes().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit()))
}

impl Gloss {
    pub fn new(token: impl Into<String>) -> Result<Self, GlossError> {
        let token = token.into();
        if !is_valid_token(&token) {
            return Err(GlossError::CharsetViolation {
                raw: token.clone(),
                cleaned: token,
            });
        }
        let segments: Vec<&str> = token.split('-').collect();
        let kind = if segments.len() >= 2 && segments.iter().all(|s| s.len() == 1) {
            GlossKind::Fingerspelling
        } else {
            GlossKind::Plain
        };
        Ok(Self { token, kind })
    }

    /// Hyphen notation for spelling `word` letter by letter.
    pub fn fingerspell(word: &str) -> Result<Self, GlossError> {
        let letters: Vec<String> = word
            .chars()
            .filter(|c| *c != '-')
            .map(|c| c.to_ascii_uppercase().to_string())
            .collect();
        Self::new(letters.join("-"))
    }

    pub fn token(&self) -> &str {
        &self.token
    }

    pub fn kind(&self) -> GlossKind {
        self.kind
    }

    pub fn is_fingerspelling(&self) -> bool {
        self.kind == GlossKind::Fingerspelling
    }

    /// Single characters making up a fingerspelled token, or the characters
    /// of a plain token when it has to be spelled out.
    pub fn letters(&self) -> Vec<char> {
        self.token.chars().filter(|c| *c != '-').collect()
    }
}

impl fmt::Display for Gloss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token)
    }
}

impl TryFrom<String> for Gloss {
    type Error = GlossError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Gloss::new(value)
    }
}

impl From<Gloss> for String {
    fn from(g: Gloss) -> String {
        g.token
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Rule,
    #[serde(rename = "llm")]
    Llm,
    Manual,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlossSequence {
    pub step_index: usize,
    pub glosses: Vec<Gloss>,
    pub provenance: Provenance,
}

impl GlossSequence {
    pub fn new(step_index: usize, glosses: Vec<Gloss>, provenance: Provenance) -> Self {
        Self {
            step_index,
            glosses,
            provenance,
        }
    }

    pub fn from_raw(step_index: usize, raw: &str, provenance: Provenance) -> Result<Self, GlossError> {
        Ok(Self::new(step_index, normalize(raw)?, provenance))
    }

    pub fn render(&self) -> String {
        render(&self.glosses)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.glosses.iter().map(Gloss::token)
    }
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{2018}' | '\u{2019}' | '\u{201C}' | '\u{201D}' | '\u{2013}' | '\u{2014}' | '\u{2026}'
                | '\u{00AB}' | '\u{00BB}' | '\u{00BF}' | '\u{00A1}' | '\u{00B7}'
        )
}

/// Cleans one whitespace-delimited token. `Ok(None)` when nothing survives.
pub fn normalize_token(raw: &str) -> Result<Option<Gloss>, GlossError> {
    // clitics go with the apostrophe: OVEN'S -> OVEN
    let body = match raw.find(['\'', '\u{2019}']) {
        Some(0) => &raw[raw.chars().next().map_or(0, char::len_utf8)..],
        Some(pos) => &raw[..pos],
        None => raw,
    };
    let mut cleaned = String::with_capacity(body.len());
    for c in body.chars() {
        if c == '-' {
            if !cleaned.is_empty() && !cleaned.ends_with('-') {
                cleaned.push('-');
            }
        } else if !is_punctuation(c) {
            cleaned.extend(c.to_uppercase());
        }
    }
    while cleaned.ends_with('-') {
        cleaned.pop();
    }
    if cleaned.is_empty() {
        return Ok(None);
    }
    if !is_valid_token(&cleaned) {
        return Err(GlossError::CharsetViolation {
            raw: raw.to_string(),
            cleaned,
        });
    }
    Gloss::new(cleaned).map(Some)
}

/// Strips punctuation (hyphens kept), uppercases and splits on whitespace.
/// Hyphen-notated fingerspelling stays a single token.
pub fn normalize(raw: &str) -> Result<Vec<Gloss>, GlossError> {
    let mut out = Vec::new();
    for tok in raw.split_whitespace() {
        if let Some(g) = normalize_token(tok)? {
            out.push(g);
        }
    }
    Ok(out)
}

pub fn render(glosses: &[Gloss]) -> String {
    let tokens: Vec<&str> = glosses.iter().map(Gloss::token).collect();
    tokens.join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Issue {
    UnknownGloss,
    DuplicateConflict,
    CharsetViolation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationFinding {
    pub step_index: usize,
    pub token: String,
    pub issue: Issue,
}

/// Reports tokens the manifest cannot serve directly. Fingerspelled tokens are
/// checked letter by letter.
pub fn validate_sequence(seq: &GlossSequence, manifest: &VideoManifest) -> Vec<ValidationFinding> {
    let mut findings = Vec::new();
    for g in &seq.glosses {
        if !manifest.covers(g) {
            findings.push(ValidationFinding {
                step_index: seq.step_index,
                token: g.token().to_string(),
                issue: Issue::UnknownGloss,
            });
        }
        if manifest.has_conflict(g.token()) {
            findings.push(ValidationFinding {
                step_index: seq.step_index,
                token: g.token().to_string(),
                issue: Issue::DuplicateConflict,
            });
        }
    }
    findings
}

/// Like [`validate_sequence`] but starts from raw text, so charset problems
/// become findings instead of aborting the check.
pub fn check_raw(step_index: usize, raw: &str, manifest: &VideoManifest) -> Vec<ValidationFinding> {
    let mut glosses = Vec::new();
    let mut findings = Vec::new();
    for tok in raw.split_whitespace() {
        match normalize_token(tok) {
            Ok(Some(g)) => glosses.push(g),
            Ok(None) => {}
            Err(GlossError::CharsetViolation { raw, .. }) => findings.push(ValidationFinding {
                step_index,
                token: raw,
                issue: Issue::CharsetViolation,
            }),
        }
    }
    let seq = GlossSequence::new(step_index, glosses, Provenance::Manual);
    findings.extend(validate_sequence(&seq, manifest));
    findings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolve::{Source, VideoAsset};
    use proptest::prelude::*;

    fn tokens(gs: &[Gloss]) -> Vec<&str> {
        gs.iter().map(Gloss::token).collect()
    }

    #[test]
    fn fingerspelling_stays_one_token() {
        let g = normalize("F-I-N-G-E-R").unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].token(), "F-I-N-G-E-R");
        assert_eq!(g[0].kind(), GlossKind::Fingerspelling);
    }

    #[test]
    fn punctuation_and_case() {
        let g = normalize("stir.").unwrap();
        assert_eq!(tokens(&g), ["STIR"]);
        assert_eq!(g[0].kind(), GlossKind::Plain);
        assert_eq!(tokens(&normalize("Mix, then pour!").unwrap()), ["MIX", "THEN", "POUR"]);
        assert_eq!(tokens(&normalize("  oven's   heat ").unwrap()), ["OVEN", "HEAT"]);
        assert_eq!(tokens(&normalize("half-inch -- , t-o-f-u").unwrap()), ["HALF-INCH", "T-O-F-U"]);
        assert!(normalize("").unwrap().is_empty());
    }

    #[test]
    fn charset_violation() {
        let err = normalize("JALAPEÑO").unwrap_err();
        assert!(matches!(err, GlossError::CharsetViolation { .. }));
    }

    #[test]
    fn gloss_kind_rules() {
        assert_eq!(Gloss::new("A-B").unwrap().kind(), GlossKind::Fingerspelling);
        assert_eq!(Gloss::new("A").unwrap().kind(), GlossKind::Plain);
        assert_eq!(Gloss::new("AB-C").unwrap().kind(), GlossKind::Plain);
        assert!(Gloss::new("a").is_err());
        assert!(Gloss::new("A--B").is_err());
        assert_eq!(Gloss::fingerspell("tofu").unwrap().token(), "T-O-F-U");
    }

    fn manifest(keys: &[&str]) -> VideoManifest {
        VideoManifest::from_assets(keys.iter().map(|k| VideoAsset {
            gloss_key: k.to_string(),
            uri: format!("{k}.mp4"),
            source: Source::Primary,
            duration_ms: None,
        }))
        .unwrap()
    }

    #[test]
    fn validation_findings() {
        let m = manifest(&["CHOP", "ADD", "STIR"]);
        let seq = GlossSequence::from_raw(0, "CHOP ADD", Provenance::Llm).unwrap();
        assert!(validate_sequence(&seq, &m).is_empty());

        let seq = GlossSequence::from_raw(3, "DOUGH", Provenance::Llm).unwrap();
        assert_eq!(
            validate_sequence(&seq, &m),
            vec![ValidationFinding {
                step_index: 3,
                token: "DOUGH".into(),
                issue: Issue::UnknownGloss
            }]
        );

        let letters: Vec<String> = ('A'..='Z').map(|c| c.to_string()).collect();
        let refs: Vec<&str> = letters.iter().map(String::as_str).collect();
        let m = manifest(&refs);
        let seq = GlossSequence::from_raw(0, "T-O-F-U", Provenance::Llm).unwrap();
        assert!(validate_sequence(&seq, &m).is_empty());

        let findings = check_raw(1, "CHOP JALAPEÑO", &manifest(&["CHOP"]));
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].issue, Issue::CharsetViolation);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(raw in "[ a-zA-Z0-9,.!?'-]{0,40}") {
            if let Ok(first) = normalize(&raw) {
                let again = normalize(&render(&first)).unwrap();
                prop_assert_eq!(again, first);
            }
        }

        #[test]
        fn output_respects_charset_or_errors(raw in "\\PC{0,30}") {
            match normalize(&raw) {
                Ok(gs) => for g in gs { prop_assert!(is_valid_token(g.token())) },
                Err(GlossError::CharsetViolation { .. }) => {}
            }
        }

        #[test]
        fn never_merges_plain_tokens(words in proptest::collection::vec("[a-z]{1,6}", 0..8)) {
            let raw = words.join(" ");
            let out = normalize(&raw).unwrap();
            let expected: Vec<String> = words.iter().map(|w| w.to_uppercase()).collect();
            prop_assert_eq!(tokens(&out), expected.iter().map(String::as_str).collect::<Vec<_>>());
        }
    }
}
