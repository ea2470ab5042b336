//! The sign-video dictionary: one asset per gloss key, plus single-character
//! clips used for fingerspelling.
//!
//! File format is a flat JSON object:
//! `{"STIR": {"uri": "STIR.mp4", "source": "primary", "duration_ms": 1400}, ...}`.
//! Single-character keys (`A`..`Z`, `0`..`9`) are the letter clips.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::gloss::{is_valid_token, Gloss};

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest key `{0}` is not a valid gloss token")]
    InvalidKey(String),
    #[error("manifest entry `{0}` has an empty uri")]
    EmptyUri(String),
    #[error("malformed manifest: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    #[default]
    Primary,
    Backup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoAsset {
    pub gloss_key: String,
    pub uri: String,
    pub source: Source,
    pub duration_ms: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AssetRecord {
    uri: String,
    #[serde(default)]
    source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    duration_ms: Option<u64>,
}

/// Map entries in document order, duplicates kept.
struct OrderedEntries(Vec<(String, AssetRecord)>);

impl<'de> Deserialize<'de> for OrderedEntries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = OrderedEntries;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping gloss keys to video records")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, AssetRecord>()? {
                    out.push((k, v));
                }
                Ok(OrderedEntries(out))
            }
        }
        deserializer.deserialize_map(V)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VideoManifest {
    entries: BTreeMap<String, VideoAsset>,
    letter_clips: BTreeMap<char, VideoAsset>,
    source_priority: Vec<Source>,
    conflicts: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingAsset {
    pub gloss_key: String,
    pub uri: String,
    pub expected_path: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checked: usize,
    /// Remote URIs that cannot be checked against a local directory.
    pub skipped_remote: usize,
    pub missing: Vec<MissingAsset>,
}

fn is_letter_key(key: &str) -> Option<char> {
    let mut chars = key.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_uppercase() || c.is_ascii_digit() => Some(c),
        _ => None,
    }
}

impl VideoManifest {
    /// Builds a manifest; the first asset seen for a key wins and later ones
    /// with a different URI are recorded as conflicts.
    pub fn from_assets(assets: impl IntoIterator<Item = VideoAsset>) -> Result<Self, ManifestError> {
        let mut m = VideoManifest {
            source_priority: vec![Source::Primary, Source::Backup],
            ..Default::default()
        };
        for asset in assets {
            m.add(asset)?;
        }
        Ok(m)
    }

    fn add(&mut self, asset: VideoAsset) -> Result<(), ManifestError> {
        if !is_valid_token(&asset.gloss_key) {
            return Err(ManifestError::InvalidKey(asset.gloss_key));
        }
        if asset.uri.trim().is_empty() {
            return Err(ManifestError::EmptyUri(asset.gloss_key));
        }
        let existing = match is_letter_key(&asset.gloss_key) {
            Some(c) => self.letter_clips.get(&c),
            None => self.entries.get(&asset.gloss_key),
        };
        if let Some(existing) = existing {
            if existing.uri != asset.uri {
                // a better-ranked source replaces a worse one without conflict
                let rank = |s: Source| self.source_priority.iter().position(|p| *p == s);
                if existing.source != asset.source {
                    if rank(asset.source) < rank(existing.source) {
                        self.insert(asset);
                    }
                    return Ok(());
                }
                let list = self.conflicts.entry(asset.gloss_key.clone()).or_default();
                if list.is_empty() {
                    list.push(existing.uri.clone());
                }
                list.push(asset.uri);
            }
            return Ok(());
        }
        self.insert(asset);
        Ok(())
    }

    fn insert(&mut self, asset: VideoAsset) {
        match is_letter_key(&asset.gloss_key) {
            Some(c) => {
                self.letter_clips.insert(c, asset);
            }
            None => {
                self.entries.insert(asset.gloss_key.clone(), asset);
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ManifestError> {
        let OrderedEntries(records) = serde_json::from_str(text)?;
        Self::from_assets(records.into_iter().map(|(key, r)| VideoAsset {
            gloss_key: key,
            uri: r.uri,
            source: r.source,
            duration_ms: r.duration_ms,
        }))
    }

    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Builds a manifest from directories of `<GLOSS>.mp4` files. Keys are
    /// uppercased file stems; URIs are the file names relative to each
    /// directory's parent (`primary/STIR.mp4`).
    pub fn scan_dirs(primary: &Path, backup: Option<&Path>) -> Result<Self, ManifestError> {
        let mut assets = Vec::new();
        for (dir, source) in std::iter::once((primary, Source::Primary))
            .chain(backup.map(|b| (b, Source::Backup)))
        {
            let prefix = dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
                .map_err(|source| ManifestError::Io {
                    path: dir.display().to_string(),
                    source,
                })?
                .filter_map(Result::ok)
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("mp4")))
                .collect();
            files.sort();
            for path in files {
                let stem = path.file_stem().unwrap_or_default().to_string_lossy();
                let name = path.file_name().unwrap_or_default().to_string_lossy();
                assets.push(VideoAsset {
                    gloss_key: stem.to_uppercase(),
                    uri: format!("{prefix}/{name}"),
                    source,
                    duration_ms: None,
                });
            }
        }
        Self::from_assets(assets)
    }

    pub fn to_json(&self) -> String {
        let mut map = BTreeMap::new();
        for asset in self.letter_clips.values().chain(self.entries.values()) {
            map.insert(
                asset.gloss_key.clone(),
                AssetRecord {
                    uri: asset.uri.clone(),
                    source: asset.source,
                    duration_ms: asset.duration_ms,
                },
            );
        }
        serde_json::to_string_pretty(&map).expect("manifest serializes")
    }

    /// Direct lookup; a single-character token also matches its letter clip.
    pub fn get(&self, token: &str) -> Option<&VideoAsset> {
        self.entries
            .get(token)
            .or_else(|| is_letter_key(token).and_then(|c| self.letter_clips.get(&c)))
    }

    pub fn letter(&self, c: char) -> Option<&VideoAsset> {
        self.letter_clips.get(&c.to_ascii_uppercase())
    }

    /// Whether `g` can be shown without substitution: its key is present, or
    /// it is fingerspelled and every letter has a clip.
    pub fn covers(&self, g: &Gloss) -> bool {
        self.get(g.token()).is_some()
            || (g.is_fingerspelling() && g.letters().iter().all(|c| self.letter(*c).is_some()))
    }

    pub fn has_conflict(&self, token: &str) -> bool {
        self.conflicts.contains_key(token)
    }

    pub fn conflicts(&self) -> &BTreeMap<String, Vec<String>> {
        &self.conflicts
    }

    pub fn entries(&self) -> impl Iterator<Item = &VideoAsset> {
        self.entries.values()
    }

    pub fn entry_keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn letter_clips(&self) -> impl Iterator<Item = &VideoAsset> {
        self.letter_clips.values()
    }

    pub fn source_priority(&self) -> &[Source] {
        &self.source_priority
    }

    /// Number of gloss entries, letter clips excluded.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Same letter clips, gloss entries restricted to `keys`.
    pub fn subset<'a>(&self, keys: impl IntoIterator<Item = &'a str>) -> Self {
        let mut out = VideoManifest {
            entries: BTreeMap::new(),
            letter_clips: self.letter_clips.clone(),
            source_priority: self.source_priority.clone(),
            conflicts: BTreeMap::new(),
        };
        for k in keys {
            if let Some(a) = self.entries.get(k) {
                out.entries.insert(k.to_string(), a.clone());
            }
        }
        out
    }

    /// Copy with one more entry.
    pub fn with_asset(&self, asset: VideoAsset) -> Result<Self, ManifestError> {
        let mut out = self.clone();
        out.add(asset)?;
        Ok(out)
    }

    /// Checks every relative (or `file://`) URI against files under `root`.
    pub fn verify(&self, root: &Path) -> VerifyReport {
        let mut report = VerifyReport::default();
        for asset in self.letter_clips.values().chain(self.entries.values()) {
            let local = match url::Url::parse(&asset.uri) {
                Ok(u) if u.scheme() == "file" => u.to_file_path().ok(),
                Ok(_) => None,
                Err(_) => Some(root.join(&asset.uri)),
            };
            match local {
                None => report.skipped_remote += 1,
                Some(path) => {
                    report.checked += 1;
                    if !path.is_file() {
                        report.missing.push(MissingAsset {
                            gloss_key: asset.gloss_key.clone(),
                            uri: asset.uri.clone(),
                            expected_path: path,
                        });
                    }
                }
            }
        }
        report
    }
}
