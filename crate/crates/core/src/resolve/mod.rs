//! Gloss-to-video resolution and playlist stitching.
//!
//! Each gloss walks a fallback ladder: direct primary video, backup video,
//! compound decomposition, fingerspelling from letter clips, synonym
//! substitution (crucial glosses only), and finally dropping the gloss.

mod compile;
mod manifest;
mod tables;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compile::{compile_task, CompiledStep, CompiledTask, StepStatus};
pub use manifest::{ManifestError, MissingAsset, Source, VerifyReport, VideoAsset, VideoManifest};
pub use tables::{CompoundTable, SynonymTable, TableError};

use crate::gloss::{Gloss, GlossSequence};
use crate::rule::{Lexicon, LexiconTagger, Pos, PosTagger};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum ResolveError {
    #[error("step {step_index}: crucial gloss `{token}` has no video, decomposition, letters, or synonym")]
    UnresolvableCrucialGloss { step_index: usize, token: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Resolution {
    Direct,
    Backup,
    Compound { parts: Vec<String> },
    Fingerspelled { letters: Vec<String> },
    Synonym { substitute: String },
    Dropped { reason: String },
}

impl Resolution {
    /// Ladder position, higher is better: Direct 5 ... Dropped 0.
    pub fn rank(&self) -> u8 {
        match self {
            Resolution::Direct => 5,
            Resolution::Backup => 4,
            Resolution::Compound { .. } => 3,
            Resolution::Fingerspelled { .. } => 2,
            Resolution::Synonym { .. } => 1,
            Resolution::Dropped { .. } => 0,
        }
    }

    /// Ladder position under `order`; the two lowest rungs before dropping
    /// trade places when synonyms come first.
    pub fn rank_in(&self, order: FallbackOrder) -> u8 {
        match (order, self) {
            (FallbackOrder::PreferSynonym, Resolution::Fingerspelled { .. }) => 1,
            (FallbackOrder::PreferSynonym, Resolution::Synonym { .. }) => 2,
            _ => self.rank(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Resolution::Direct => "direct",
            Resolution::Backup => "backup",
            Resolution::Compound { .. } => "compound",
            Resolution::Fingerspelled { .. } => "fingerspelled",
            Resolution::Synonym { .. } => "synonym",
            Resolution::Dropped { .. } => "dropped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedGloss {
    pub gloss: Gloss,
    pub resolution: Resolution,
    pub uris: Vec<String>,
}

/// Where fingerspelling sits relative to synonym substitution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FallbackOrder {
    /// direct, backup, compound, fingerspell, synonym, drop
    #[default]
    FingerspellFirst,
    /// direct, backup, compound, synonym, fingerspell, drop
    PreferSynonym,
}

/// Decides whether a gloss may be dropped when nothing else works.
pub trait Crucial: Send + Sync {
    fn is_crucial(&self, gloss: &Gloss) -> bool;
}

/// Nouns, verbs, adjectives and numerals are crucial by default; the tag of a
/// gloss comes from tagging its lowercase form in isolation.
#[derive(Debug, Clone)]
pub struct PosCrucialPolicy {
    lexicon: Arc<Lexicon>,
    pub crucial: BTreeSet<Pos>,
}

impl PosCrucialPolicy {
    pub fn new(lexicon: Arc<Lexicon>) -> Self {
        Self {
            lexicon,
            crucial: [Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Numeral].into_iter().collect(),
        }
    }

    pub fn with_crucial(mut self, tags: impl IntoIterator<Item = Pos>) -> Self {
        self.crucial = tags.into_iter().collect();
        self
    }
}

impl Crucial for PosCrucialPolicy {
    fn is_crucial(&self, gloss: &Gloss) -> bool {
        if gloss.is_fingerspelling() {
            return true;
        }
        let pos = LexiconTagger::new(&self.lexicon).tag_word(&gloss.token().to_lowercase());
        self.crucial.contains(&pos)
    }
}

/// Constant answer, for tests and tooling.
#[derive(Debug, Clone, Copy)]
pub struct AllCrucial(pub bool);

impl Crucial for AllCrucial {
    fn is_crucial(&self, _: &Gloss) -> bool {
        self.0
    }
}

/// Everything the ladder consults, immutable once built.
#[derive(Debug, Clone, Default)]
pub struct ResolveTables {
    pub manifest: VideoManifest,
    pub synonyms: SynonymTable,
    pub compounds: CompoundTable,
}

fn direct(manifest: &VideoManifest, token: &str) -> Option<(Resolution, Vec<String>)> {
    manifest.get(token).map(|a| {
        let res = match a.source {
            Source::Primary => Resolution::Direct,
            Source::Backup => Resolution::Backup,
        };
        (res, vec![a.uri.clone()])
    })
}

fn compound(tables: &ResolveTables, token: &str) -> Option<(Resolution, Vec<String>)> {
    let parts = tables.compounds.parts(token)?;
    let uris: Option<Vec<String>> = parts
        .iter()
        .map(|p| tables.manifest.get(p).map(|a| a.uri.clone()))
        .collect();
    uris.map(|uris| {
        (
            Resolution::Compound {
                parts: parts.to_vec(),
            },
            uris,
        )
    })
}

fn fingerspell(manifest: &VideoManifest, gloss: &Gloss) -> Option<(Resolution, Vec<String>)> {
    let letters = gloss.letters();
    if letters.is_empty() {
        return None;
    }
    let uris: Option<Vec<String>> = letters
        .iter()
        .map(|c| manifest.letter(*c).map(|a| a.uri.clone()))
        .collect();
    uris.map(|uris| {
        (
            Resolution::Fingerspelled {
                letters: letters.iter().map(char::to_string).collect(),
            },
            uris,
        )
    })
}

fn synonym(tables: &ResolveTables, token: &str) -> Option<(Resolution, Vec<String>)> {
    let best = tables
        .synonyms
        .ranked_candidates(token, |s| tables.manifest.get(s).is_some())
        .into_iter()
        .next()?;
    let asset = tables.manifest.get(best)?;
    Some((
        Resolution::Synonym {
            substitute: best.to_string(),
        },
        vec![asset.uri.clone()],
    ))
}

/// Walks the ladder for one gloss. The first rung that applies wins.
pub fn resolve_gloss(
    gloss: &Gloss,
    tables: &ResolveTables,
    crucial: bool,
    order: FallbackOrder,
) -> Result<ResolvedGloss, ResolveError> {
    let token = gloss.token();
    let spelled = || fingerspell(&tables.manifest, gloss);
    let substituted = || if crucial { synonym(tables, token) } else { None };
    let found = direct(&tables.manifest, token)
        .or_else(|| compound(tables, token))
        .or_else(|| match order {
            FallbackOrder::FingerspellFirst => spelled().or_else(substituted),
            FallbackOrder::PreferSynonym => substituted().or_else(spelled),
        });
    match found {
        Some((resolution, uris)) => Ok(ResolvedGloss {
            gloss: gloss.clone(),
            resolution,
            uris,
        }),
        None if crucial => Err(ResolveError::UnresolvableCrucialGloss {
            step_index: 0,
            token: token.to_string(),
        }),
        None => Ok(ResolvedGloss {
            gloss: gloss.clone(),
            resolution: Resolution::Dropped {
                reason: "no video and not crucial".into(),
            },
            uris: Vec::new(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedStep {
    pub step_index: usize,
    pub glosses: Vec<ResolvedGloss>,
}

/// Resolution context for one compilation run. The memo cache lives only as
/// long as this value.
pub struct Resolver<'a> {
    pub tables: &'a ResolveTables,
    pub crucial: &'a dyn Crucial,
    pub order: FallbackOrder,
    memo: HashMap<String, Result<ResolvedGloss, ResolveError>>,
    memoize: bool,
}

impl<'a> Resolver<'a> {
    pub fn new(tables: &'a ResolveTables, crucial: &'a dyn Crucial, order: FallbackOrder) -> Self {
        Self {
            tables,
            crucial,
            order,
            memo: HashMap::new(),
            memoize: true,
        }
    }

    pub fn without_memo(mut self) -> Self {
        self.memoize = false;
        self
    }

    pub fn resolve(&mut self, gloss: &Gloss) -> Result<ResolvedGloss, ResolveError> {
        if self.memoize {
            if let Some(hit) = self.memo.get(gloss.token()) {
                return hit.clone();
            }
        }
        let crucial = self.crucial.is_crucial(gloss);
        let out = resolve_gloss(gloss, self.tables, crucial, self.order);
        if self.memoize {
            self.memo.insert(gloss.token().to_string(), out.clone());
        }
        out
    }

    /// Resolves every gloss of a step in order. Fails on the first
    /// unresolvable crucial gloss.
    pub fn resolve_step(&mut self, seq: &GlossSequence) -> Result<ResolvedStep, ResolveError> {
        let mut glosses = Vec::with_capacity(seq.glosses.len());
        for g in &seq.glosses {
            match self.resolve(g) {
                Ok(r) => glosses.push(r),
                Err(ResolveError::UnresolvableCrucialGloss { token, .. }) => {
                    return Err(ResolveError::UnresolvableCrucialGloss {
                        step_index: seq.step_index,
                        token,
                    })
                }
            }
        }
        Ok(ResolvedStep {
            step_index: seq.step_index,
            glosses,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentSpan {
    pub gloss: String,
    pub resolution: String,
    /// Index of the first segment for this gloss.
    pub start: usize,
    /// Number of segments; 0 for dropped glosses.
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Playlist {
    pub step_index: usize,
    pub segments: Vec<String>,
    pub boundaries: Vec<SegmentSpan>,
}

/// Flattens per-gloss URIs into one ordered segment list.
pub fn stitch(resolved: &ResolvedStep) -> Playlist {
    let mut segments = Vec::new();
    let mut boundaries = Vec::with_capacity(resolved.glosses.len());
    for r in &resolved.glosses {
        boundaries.push(SegmentSpan {
            gloss: r.gloss.token().to_string(),
            resolution: r.resolution.label().to_string(),
            start: segments.len(),
            len: r.uris.len(),
        });
        segments.extend(r.uris.iter().cloned());
    }
    Playlist {
        step_index: resolved.step_index,
        segments,
        boundaries,
    }
}
