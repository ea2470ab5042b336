//! Word list and suffix tables backing the tagger and lemmatizer.
//!
//! `lexicon.tsv` rows are `word<TAB>POS[,POS...][<TAB>lemma]`; a word may
//! repeat on several rows when its lemma depends on the tag. `suffix_rules.tsv`
//! rows are `lemma<TAB>POS<TAB>suffix<TAB>replacement` or `tag<TAB>POS<TAB>suffix`.

use std::collections::{BTreeSet, HashMap};
use std::io::Read;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use super::pos::Pos;

pub const LEXICON_VERSION: &str = "1";

const BUNDLED_LEXICON: &str = include_str!("../../data/lexicon.tsv");
const BUNDLED_SUFFIX_RULES: &str = include_str!("../../data/suffix_rules.tsv");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{file} line {line}: {message}")]
    Row {
        file: String,
        line: u64,
        message: String,
    },
    #[error("reading {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaRule {
    pub pos: Pos,
    pub suffix: String,
    pub replacement: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagRule {
    pub pos: Pos,
    pub suffix: String,
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    words: HashMap<String, Vec<(Pos, String)>>,
    lemmas: HashMap<String, BTreeSet<Pos>>,
    lemma_rules: Vec<LemmaRule>,
    tag_rules: Vec<TagRule>,
}

pub(crate) fn tsv_reader<R: Read>(rdr: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .quoting(false)
        .trim(csv::Trim::All)
        .from_reader(rdr)
}

fn row_err(file: &str, rec: &csv::StringRecord, message: impl Into<String>) -> LexiconError {
    LexiconError::Row {
        file: file.to_string(),
        line: rec.position().map_or(0, |p| p.line()),
        message: message.into(),
    }
}

fn parse_pos(file: &str, rec: &csv::StringRecord, field: &str) -> Result<Pos, LexiconError> {
    field.parse().map_err(|e: super::pos::UnknownPos| row_err(file, rec, e.to_string()))
}

impl Lexicon {
    pub fn bundled() -> &'static Lexicon {
        static BUNDLED: OnceLock<Lexicon> = OnceLock::new();
        BUNDLED.get_or_init(|| {
            Lexicon::from_readers(BUNDLED_LEXICON.as_bytes(), BUNDLED_SUFFIX_RULES.as_bytes())
                .expect("bundled lexicon tables are valid")
        })
    }

    pub fn from_files(lexicon: &Path, suffix_rules: &Path) -> Result<Self, LexiconError> {
        let open = |p: &Path| {
            std::fs::File::open(p).map_err(|source| LexiconError::Io {
                file: p.display().to_string(),
                source,
            })
        };
        Self::from_readers(open(lexicon)?, open(suffix_rules)?)
    }

    pub fn from_readers<A: Read, B: Read>(lexicon: A, suffix_rules: B) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::default();
        let file = "lexicon.tsv";
        for rec in tsv_reader(lexicon).records() {
            let rec = rec.map_err(|source| LexiconError::Csv {
                file: file.into(),
                source,
            })?;
            let word = rec.get(0).unwrap_or_default().to_lowercase();
            let tags = rec.get(1).unwrap_or_default();
            if word.is_empty() || tags.is_empty() {
                return Err(row_err(file, &rec, "expected word and at least one POS"));
            }
            let lemma = rec
                .get(2)
                .filter(|l| !l.is_empty())
                .map(str::to_lowercase)
                .unwrap_or_else(|| word.clone());
            for tag in tags.split(',') {
                let pos = parse_pos(file, &rec, tag)?;
                lex.insert(&word, pos, &lemma);
            }
        }

        let file = "suffix_rules.tsv";
        for rec in tsv_reader(suffix_rules).records() {
            let rec = rec.map_err(|source| LexiconError::Csv {
                file: file.into(),
                source,
            })?;
            let kind = rec.get(0).unwrap_or_default();
            let pos = parse_pos(file, &rec, rec.get(1).unwrap_or_default())?;
            let suffix = rec.get(2).unwrap_or_default().to_lowercase();
            if suffix.is_empty() {
                return Err(row_err(file, &rec, "empty suffix"));
            }
            match kind {
                "lemma" => lex.lemma_rules.push(LemmaRule {
                    pos,
                    suffix,
                    replacement: rec.get(3).unwrap_or_default().to_lowercase(),
                }),
                "tag" => lex.tag_rules.push(TagRule { pos, suffix }),
                other => return Err(row_err(file, &rec, format!("unknown rule kind `{other}`"))),
            }
        }
        Ok(lex)
    }

    /// Adds a single `word` entry; `lemma` is stored lowercase.
    pub fn insert(&mut self, word: &str, pos: Pos, lemma: &str) {
        let word = word.to_lowercase();
        let lemma = lemma.to_lowercase();
        let entry = self.words.entry(word).or_default();
        if !entry.iter().any(|(p, l)| *p == pos && *l == lemma) {
            entry.push((pos, lemma.clone()));
        }
        self.lemmas.entry(lemma).or_default().insert(pos);
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Tags listed for `word`, in file order, without duplicates.
    pub fn tags(&self, word: &str) -> Vec<Pos> {
        let mut out = Vec::new();
        if let Some(entries) = self.words.get(&word.to_lowercase()) {
            for (p, _) in entries {
                if !out.contains(p) {
                    out.push(*p);
                }
            }
        }
        out
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains_key(&word.to_lowercase())
    }

    pub fn lemma_for(&self, word: &str, pos: Pos) -> Option<&str> {
        self.words
            .get(word)?
            .iter()
            .find(|(p, _)| *p == pos)
            .map(|(_, l)| l.as_str())
    }

    pub fn first_lemma(&self, word: &str) -> Option<&str> {
        self.words.get(word)?.first().map(|(_, l)| l.as_str())
    }

    /// Whether `lemma` is a known base form with tag `pos`.
    pub fn is_lemma(&self, lemma: &str, pos: Pos) -> bool {
        self.lemmas.get(lemma).is_some_and(|tags| tags.contains(&pos))
    }

    pub fn lemma_rules(&self) -> &[LemmaRule] {
        &self.lemma_rules
    }

    pub fn tag_rules(&self) -> &[TagRule] {
        &self.tag_rules
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.keys().map(String::as_str)
    }
}
