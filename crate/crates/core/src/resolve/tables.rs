//! Synonym and compound-decomposition tables (TSV).

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use thiserror::Error;

use crate::gloss::is_valid_token;
use crate::rule::tsv_reader;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("{file} line {line}: {message}")]
    Row {
        file: String,
        line: u64,
        message: String,
    },
    #[error("{file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn open(path: &Path) -> Result<std::fs::File, TableError> {
    std::fs::File::open(path).map_err(|source| TableError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn records<R: Read>(rdr: R, file: &str) -> impl Iterator<Item = Result<(u64, Vec<String>), TableError>> {
    let file = file.to_string();
    tsv_reader(rdr).into_records().map(move |rec| {
        let rec = rec.map_err(|source| TableError::Csv {
            file: file.clone(),
            source,
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        Ok((line, rec.iter().map(|f| f.to_uppercase()).collect()))
    })
}

fn check_token(file: &str, line: u64, token: &str) -> Result<(), TableError> {
    if is_valid_token(token) {
        Ok(())
    } else {
        Err(TableError::Row {
            file: file.into(),
            line,
            message: format!("`{token}` is not a valid gloss token"),
        })
    }
}

/// Symmetric, irreflexive synonym relation over gloss tokens, with optional
/// corpus frequencies used to rank substitutes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymTable {
    pairs: BTreeMap<String, BTreeSet<String>>,
    frequency: BTreeMap<String, u64>,
}

impl SynonymTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `a ~ b` in both directions; self-pairs are ignored.
    pub fn add_pair(&mut self, a: &str, b: &str) {
        if a == b {
            return;
        }
        self.pairs.entry(a.to_string()).or_default().insert(b.to_string());
        self.pairs.entry(b.to_string()).or_default().insert(a.to_string());
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut t = Self::new();
        for (a, b) in pairs {
            t.add_pair(a, b);
        }
        t
    }

    /// Rows are `TOKEN<TAB>SYNONYM[<TAB>SYNONYM...]`; every listed token is
    /// paired with the first.
    pub fn from_reader<R: Read>(rdr: R) -> Result<Self, TableError> {
        let file = "synonyms.tsv";
        let mut t = Self::new();
        for row in records(rdr, file) {
            let (line, fields) = row?;
            let fields: Vec<&String> = fields.iter().filter(|f| !f.is_empty()).collect();
            if fields.len() < 2 {
                return Err(TableError::Row {
                    file: file.into(),
                    line,
                    message: "expected at least two tokens".into(),
                });
            }
            for f in &fields {
                check_token(file, line, f)?;
            }
            for other in &fields[1..] {
                t.add_pair(fields[0], other);
            }
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self, TableError> {
        Self::from_reader(open(path)?)
    }

    /// Rows are `TOKEN<TAB>COUNT`.
    pub fn load_frequencies<R: Read>(&mut self, rdr: R) -> Result<(), TableError> {
        let file = "gloss_frequency.tsv";
        for row in records(rdr, file) {
            let (line, fields) = row?;
            let count = fields
                .get(1)
                .and_then(|c| c.parse::<u64>().ok())
                .ok_or_else(|| TableError::Row {
                    file: file.into(),
                    line,
                    message: "expected TOKEN<TAB>COUNT".into(),
                })?;
            self.frequency.insert(fields[0].clone(), count);
        }
        Ok(())
    }

    pub fn set_frequency(&mut self, token: &str, count: u64) {
        self.frequency.insert(token.to_string(), count);
    }

    pub fn frequency(&self, token: &str) -> u64 {
        self.frequency.get(token).copied().unwrap_or(0)
    }

    pub fn synonyms(&self, token: &str) -> impl Iterator<Item = &str> {
        self.pairs
            .get(token)
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        self.pairs.get(a).is_some_and(|s| s.contains(b))
    }

    /// Synonyms of `token` for which `available` holds, best first: higher
    /// corpus frequency, then lexicographic.
    pub fn ranked_candidates<'a>(&'a self, token: &str, available: impl Fn(&str) -> bool) -> Vec<&'a str> {
        let mut c: Vec<&str> = self.synonyms(token).filter(|s| available(s)).collect();
        c.sort_by(|a, b| self.frequency(b).cmp(&self.frequency(a)).then_with(|| a.cmp(b)));
        c
    }

    pub fn len(&self) -> usize {
        self.pairs.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Gloss token -> ordered component signs (e.g. `CUPCAKE -> CUP CAKE`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompoundTable {
    parts: BTreeMap<String, Vec<String>>,
}

impl CompoundTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, token: &str, parts: Vec<String>) {
        self.parts.insert(token.to_string(), parts);
    }

    /// Rows are `TOKEN<TAB>PART PART...`.
    pub fn from_reader<R: Read>(rdr: R) -> Result<Self, TableError> {
        let file = "compounds.tsv";
        let mut t = Self::new();
        for row in records(rdr, file) {
            let (line, fields) = row?;
            let (Some(token), Some(parts)) = (fields.first(), fields.get(1)) else {
                return Err(TableError::Row {
                    file: file.into(),
                    line,
                    message: "expected TOKEN<TAB>PARTS".into(),
                });
            };
            check_token(file, line, token)?;
            let parts: Vec<String> = parts.split_whitespace().map(str::to_string).collect();
            if parts.len() < 2 {
                return Err(TableError::Row {
                    file: file.into(),
                    line,
                    message: "a compound needs at least two parts".into(),
                });
            }
            for p in &parts {
                check_token(file, line, p)?;
            }
            t.insert(token, parts);
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self, TableError> {
        Self::from_reader(open(path)?)
    }

    pub fn parts(&self, token: &str) -> Option<&[String]> {
        self.parts.get(token).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_and_irreflexive() {
        let t = SynonymTable::from_reader("MIX\tCOMBINE\tBLEND\nstir\tstir\n".as_bytes());
        // a self-pair row has only one distinct token but still parses
        let t = t.unwrap();
        assert!(t.are_synonyms("COMBINE", "MIX"));
        assert!(t.are_synonyms("BLEND", "MIX"));
        assert!(!t.are_synonyms("BLEND", "COMBINE"));
        assert!(!t.are_synonyms("STIR", "STIR"));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn ranking_is_deterministic() {
        let mut t = SynonymTable::from_pairs([("MIX", "COMBINE"), ("MIX", "BLEND"), ("MIX", "STIR")]);
        assert_eq!(t.ranked_candidates("MIX", |_| true), ["BLEND", "COMBINE", "STIR"]);
        t.set_frequency("STIR", 9);
        t.set_frequency("COMBINE", 2);
        assert_eq!(t.ranked_candidates("MIX", |s| s != "BLEND"), ["STIR", "COMBINE"]);
        t.load_frequencies("BLEND\t20\n".as_bytes()).unwrap();
        assert_eq!(t.ranked_candidates("MIX", |_| true)[0], "BLEND");
    }

    #[test]
    fn compounds() {
        let t = CompoundTable::from_reader("# comment\ncupcake\tcup cake\n".as_bytes()).unwrap();
        assert_eq!(t.parts("CUPCAKE").unwrap(), ["CUP", "CAKE"]);
        assert!(CompoundTable::from_reader("X\tY\n".as_bytes()).is_err());
        assert!(CompoundTable::from_reader("X\n".as_bytes()).is_err());
    }
}
