//! Lexicon-first POS tagging for imperative instruction text.

use super::lemmatize::analyze;
use super::lexicon::Lexicon;
use super::pos::{Pos, TaggedToken};
use super::tokenize::is_punctuation_token;

/// Anything that assigns exactly one tag per token.
pub trait PosTagger: Send + Sync {
    fn tag(&self, tokens: &[String]) -> Vec<TaggedToken>;

    /// Tag for a word seen in isolation.
    fn tag_word(&self, word: &str) -> Pos {
        self.tag(&[word.to_string()])
            .pop()
            .map_or(Pos::Noun, |t| t.pos)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LexiconTagger<'a> {
    lexicon: &'a Lexicon,
}

fn is_numeral(token: &str) -> bool {
    token.chars().next().is_some_and(|c| c.is_ascii_digit())
        && token
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | '/' | ':'))
}

impl<'a> LexiconTagger<'a> {
    pub fn new(lexicon: &'a Lexicon) -> Self {
        Self { lexicon }
    }

    pub fn lexicon(&self) -> &'a Lexicon {
        self.lexicon
    }

    /// Possible tags for one token, most likely first.
    pub fn candidates(&self, token: &str, sentence_initial: bool) -> Vec<Pos> {
        if is_punctuation_token(token) {
            return vec![Pos::Punctuation];
        }
        if is_numeral(token) {
            return vec![Pos::Numeral];
        }
        let lower = token.to_lowercase();
        let known = self.lexicon.tags(&lower);
        if !known.is_empty() {
            return known;
        }
        if let Some((pos, _)) = analyze(self.lexicon, &lower) {
            return vec![pos];
        }
        if !sentence_initial && token.chars().next().is_some_and(char::is_uppercase) {
            return vec![Pos::Noun];
        }
        if let Some(rule) = self
            .lexicon
            .tag_rules()
            .iter()
            .find(|r| lower.len() > r.suffix.len() + 1 && lower.ends_with(r.suffix.as_str()))
        {
            return vec![rule.pos];
        }
        vec![Pos::Noun]
    }
}

fn pick(cands: &[Pos], prev: Option<Pos>, next_can_be_verb: bool, next_is_not: bool, clause_start: bool) -> Pos {
    let mut cands: Vec<Pos> = cands.to_vec();
    if cands.len() > 1 && cands.contains(&Pos::Auxiliary) && !(next_can_be_verb || next_is_not) {
        cands.retain(|p| *p != Pos::Auxiliary);
    }
    if cands.len() == 1 {
        return cands[0];
    }
    if clause_start && cands.contains(&Pos::Verb) {
        return Pos::Verb;
    }
    if matches!(prev, Some(Pos::Determiner | Pos::Adjective | Pos::Numeral)) {
        for want in [Pos::Noun, Pos::Adjective] {
            if cands.contains(&want) {
                return want;
            }
        }
    }
    cands[0]
}

impl PosTagger for LexiconTagger<'_> {
    fn tag(&self, tokens: &[String]) -> Vec<TaggedToken> {
        let cands: Vec<Vec<Pos>> = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| self.candidates(t, i == 0))
            .collect();
        let mut out: Vec<TaggedToken> = Vec::with_capacity(tokens.len());
        for (i, token) in tokens.iter().enumerate() {
            let prev = out.last().map(|t| t.pos);
            // imperative steps: a verb usually opens each clause
            let clause_start = match out.last() {
                None => true,
                Some(t) => {
                    matches!(t.pos, Pos::CoordConj | Pos::Punctuation)
                        || t.surface.eq_ignore_ascii_case("then")
                }
            };
            let next_can_be_verb = cands
                .get(i + 1)
                .is_some_and(|c| c.contains(&Pos::Verb) || c.contains(&Pos::Auxiliary));
            let next_is_not = tokens
                .get(i + 1)
                .is_some_and(|t| t.eq_ignore_ascii_case("not"));
            let pos = pick(&cands[i], prev, next_can_be_verb, next_is_not, clause_start);
            out.push(TaggedToken::new(token.clone(), pos));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::tokenize::tokenize;

    fn tags(sentence: &str) -> Vec<Pos> {
        LexiconTagger::new(Lexicon::bundled())
            .tag(&tokenize(sentence))
            .into_iter()
            .map(|t| t.pos)
            .collect()
    }

    #[test]
    fn closed_class_words() {
        let tagger = LexiconTagger::new(Lexicon::bundled());
        assert_eq!(tagger.tag_word("and"), Pos::CoordConj);
        assert_eq!(tagger.tag_word("to"), Pos::InfinitivalTo);
        assert_eq!(tagger.tag_word("the"), Pos::Determiner);
        assert_eq!(tagger.tag_word("350"), Pos::Numeral);
        assert_eq!(tagger.tag_word("."), Pos::Punctuation);
    }

    #[test]
    fn reference_sentence() {
        // matches what a Penn-style tagger gives (VB NN CC VB TO NN), mapped
        // onto the coarse tagset
        assert_eq!(
            tags("Chop chocolate and add to batter"),
            [Pos::Verb, Pos::Noun, Pos::CoordConj, Pos::Verb, Pos::InfinitivalTo, Pos::Noun]
        );
        assert_eq!(
            tags("Stir until incorporated."),
            [Pos::Verb, Pos::Preposition, Pos::Verb, Pos::Punctuation]
        );
    }

    #[test]
    fn context_rules() {
        // `can` is a modal only when a verb follows
        assert_eq!(tags("Open the can")[2], Pos::Noun);
        assert_eq!(tags("You can stir")[1], Pos::Auxiliary);
        // unknown words: suffix table, then proper-noun capitalization, then noun
        assert_eq!(tags("Stir quixotically")[1], Pos::Adverb);
        assert_eq!(tags("Add Zanzibar")[1], Pos::Noun);
        assert_eq!(tags("Add blorf")[1], Pos::Noun);
        assert_eq!(tags("Add chips")[1], Pos::Noun);
    }
}
