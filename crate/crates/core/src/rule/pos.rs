use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Coarse part-of-speech tagset used by the rule translator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pos {
    #[serde(rename = "NOUN")]
    Noun,
    #[serde(rename = "VERB")]
    Verb,
    #[serde(rename = "ADJ")]
    Adjective,
    #[serde(rename = "ADV")]
    Adverb,
    #[serde(rename = "NUM")]
    Numeral,
    #[serde(rename = "PRON")]
    Pronoun,
    /// Prepositions and subordinating conjunctions.
    #[serde(rename = "ADP")]
    Preposition,
    #[serde(rename = "CCONJ")]
    CoordConj,
    #[serde(rename = "TO")]
    InfinitivalTo,
    #[serde(rename = "DET")]
    Determiner,
    #[serde(rename = "AUX")]
    Auxiliary,
    #[serde(rename = "PUNCT")]
    Punctuation,
    #[serde(rename = "X")]
    Other,
}

impl Pos {
    pub const ALL: [Pos; 13] = [
        Pos::Noun,
        Pos::Verb,
        Pos::Adjective,
        Pos::Adverb,
        Pos::Numeral,
        Pos::Pronoun,
        Pos::Preposition,
        Pos::CoordConj,
        Pos::InfinitivalTo,
        Pos::Determiner,
        Pos::Auxiliary,
        Pos::Punctuation,
        Pos::Other,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Adjective => "ADJ",
            Pos::Adverb => "ADV",
            Pos::Numeral => "NUM",
            Pos::Pronoun => "PRON",
            Pos::Preposition => "ADP",
            Pos::CoordConj => "CCONJ",
            Pos::InfinitivalTo => "TO",
            Pos::Determiner => "DET",
            Pos::Auxiliary => "AUX",
            Pos::Punctuation => "PUNCT",
            Pos::Other => "X",
        }
    }

    /// Open-class tags: the ones that carry instruction content.
    pub fn is_content(self) -> bool {
        matches!(
            self,
            Pos::Noun | Pos::Verb | Pos::Adjective | Pos::Adverb | Pos::Numeral
        )
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown POS tag `{0}`")]
pub struct UnknownPos(pub String);

impl FromStr for Pos {
    type Err = UnknownPos;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        Pos::ALL
            .into_iter()
            .find(|p| p.code() == upper)
            .ok_or(UnknownPos(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub surface: String,
    pub pos: Pos,
}

impl TaggedToken {
    pub fn new(surface: impl Into<String>, pos: Pos) -> Self {
        Self {
            surface: surface.into(),
            pos,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip() {
        for p in Pos::ALL {
            assert_eq!(p.code().parse::<Pos>().unwrap(), p);
        }
        assert!("VB".parse::<Pos>().is_err());
    }
}
