//! Rule-based English-to-gloss translation: tokenize, tag, drop unwanted
//! parts of speech, lemmatize the rest, uppercase.
//!
//! Word order is never changed; every output gloss comes from exactly one
//! surviving input token.

mod lemmatize;
mod lexicon;
mod pos;
mod tagger;
mod tokenize;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lemmatize::lemmatize;
pub use lexicon::{LemmaRule, Lexicon, LexiconError, TagRule, LEXICON_VERSION};
pub use pos::{Pos, TaggedToken, UnknownPos};
pub use tagger::{LexiconTagger, PosTagger};
pub use tokenize::{split_sentences, tokenize};

pub(crate) use lexicon::tsv_reader;

use crate::gloss::{Gloss, GlossSequence, Provenance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("every token of `{text}` was filtered out")]
    EmptyTranslation { text: String },
}

/// Tags removed before lemmatization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosFilterPolicy {
    pub drop_set: BTreeSet<Pos>,
}

impl Default for PosFilterPolicy {
    /// Drops determiners, coordinating conjunctions, infinitival `to`,
    /// auxiliaries and punctuation. Prepositions and subordinators stay.
    fn default() -> Self {
        Self::new([
            Pos::Determiner,
            Pos::CoordConj,
            Pos::InfinitivalTo,
            Pos::Auxiliary,
            Pos::Punctuation,
        ])
    }
}

impl PosFilterPolicy {
    pub fn new(drop: impl IntoIterator<Item = Pos>) -> Self {
        Self {
            drop_set: drop.into_iter().collect(),
        }
    }

    pub fn drops(&self, pos: Pos) -> bool {
        self.drop_set.contains(&pos)
    }
}

pub fn pos_tag(tokens: &[String], lexicon: &Lexicon) -> Vec<TaggedToken> {
    LexiconTagger::new(lexicon).tag(tokens)
}

pub fn filter_pos(tagged: Vec<TaggedToken>, policy: &PosFilterPolicy) -> Vec<TaggedToken> {
    tagged.into_iter().filter(|t| !policy.drops(t.pos)).collect()
}

fn fold_accent(c: char) -> char {
    match c {
        'á' | 'à' | 'â' | 'ä' | 'ã' | 'å' | 'Á' | 'À' | 'Â' | 'Ä' | 'Ã' | 'Å' => 'A',
        'é' | 'è' | 'ê' | 'ë' | 'É' | 'È' | 'Ê' | 'Ë' => 'E',
        'í' | 'ì' | 'î' | 'ï' | 'Í' | 'Ì' | 'Î' | 'Ï' => 'I',
        'ó' | 'ò' | 'ô' | 'ö' | 'õ' | 'Ó' | 'Ò' | 'Ô' | 'Ö' | 'Õ' => 'O',
        'ú' | 'ù' | 'û' | 'ü' | 'Ú' | 'Ù' | 'Û' | 'Ü' => 'U',
        'ñ' | 'Ñ' => 'N',
        'ç' | 'Ç' => 'C',
        other => other.to_ascii_uppercase(),
    }
}

/// Forces a lemma into the gloss alphabet: clitics and symbols are dropped,
/// accents folded, hyphen runs collapsed.
fn to_gloss(lemma: &str) -> Option<Gloss> {
    let body = lemma.split(['\'', '\u{2019}']).next().unwrap_or_default();
    let mut out = String::new();
    for c in body.chars().map(fold_accent) {
        if c.is_ascii_uppercase() || c.is_ascii_digit() {
            out.push(c);
        } else if matches!(c, '-' | '/' | '.' | ',' | ':') && !out.is_empty() && !out.ends_with('-') {
            out.push('-');
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    Gloss::new(out).ok()
}

#[derive(Clone)]
pub struct RuleTranslator {
    lexicon: Arc<Lexicon>,
    tagger: Option<Arc<dyn PosTagger>>,
    pub policy: PosFilterPolicy,
    /// Uppercase each sentence before tagging instead of after lemmatizing.
    pub faithful_case_order: bool,
}

impl std::fmt::Debug for RuleTranslator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RuleTranslator")
            .field("policy", &self.policy)
            .field("faithful_case_order", &self.faithful_case_order)
            .field("custom_tagger", &self.tagger.is_some())
            .finish()
    }
}

impl Default for RuleTranslator {
    fn default() -> Self {
        Self::new(Arc::new(Lexicon::bundled().clone()))
    }
}

impl RuleTranslator {
    pub fn new(lexicon: Arc<Lexicon>) -> Self {
        Self {
            lexicon,
            tagger: None,
            policy: PosFilterPolicy::default(),
            faithful_case_order: false,
        }
    }

    pub fn with_policy(mut self, policy: PosFilterPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_tagger(mut self, tagger: Arc<dyn PosTagger>) -> Self {
        self.tagger = Some(tagger);
        self
    }

    pub fn faithful_case_order(mut self, on: bool) -> Self {
        self.faithful_case_order = on;
        self
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    fn tag(&self, tokens: &[String]) -> Vec<TaggedToken> {
        match &self.tagger {
            Some(t) => t.tag(tokens),
            None => LexiconTagger::new(&self.lexicon).tag(tokens),
        }
    }

    fn sentence_glosses(&self, sentence: &str) -> Vec<Gloss> {
        let sentence = if self.faithful_case_order {
            sentence.to_uppercase()
        } else {
            sentence.to_string()
        };
        let tokens = tokenize(&sentence);
        let kept = filter_pos(self.tag(&tokens), &self.policy);
        kept.iter()
            .filter_map(|t| to_gloss(&lemmatize(&self.lexicon, &t.surface, t.pos).to_uppercase()))
            .collect()
    }

    /// Glosses for one step; sentences are handled independently and joined
    /// in order.
    pub fn translate_text(&self, step_text: &str) -> Result<Vec<Gloss>, RuleError> {
        let glosses: Vec<Gloss> = split_sentences(step_text)
            .into_iter()
            .flat_map(|s| self.sentence_glosses(s))
            .collect();
        if glosses.is_empty() {
            return Err(RuleError::EmptyTranslation {
                text: step_text.to_string(),
            });
        }
        Ok(glosses)
    }

    pub fn translate_step(&self, step_index: usize, step_text: &str) -> Result<GlossSequence, RuleError> {
        Ok(GlossSequence::new(
            step_index,
            self.translate_text(step_text)?,
            Provenance::Rule,
        ))
    }
}

/// One-shot rule translation with an explicit policy and lexicon.
pub fn rule_translate(
    step_text: &str,
    policy: &PosFilterPolicy,
    lexicon: &Lexicon,
) -> Result<GlossSequence, RuleError> {
    let translator = RuleTranslator {
        lexicon: Arc::new(lexicon.clone()),
        tagger: None,
        policy: policy.clone(),
        faithful_case_order: false,
    };
    translator.translate_step(0, step_text)
}
