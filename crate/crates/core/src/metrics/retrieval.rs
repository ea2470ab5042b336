use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::gloss::{Gloss, GlossSequence};
use crate::resolve::{SynonymTable, VideoManifest};

/// Which Recall@1 denominator to use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecallDefinition {
    /// hits / (hits + video-less occurrences with a synonym that has a video)
    #[default]
    Recoverable,
    /// hits / all occurrences (numerically the hit rate)
    AllGlosses,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalReport {
    pub n_glosses: usize,
    pub n_hits: usize,
    pub n_synonym_recoverable: usize,
    pub hit_rate: f64,
    /// `None` when the denominator is zero.
    pub recall_at_1: Option<f64>,
    pub recall_definition: RecallDefinition,
}

/// Gloss has a video as written (letter clips count for fingerspelling).
pub fn is_hit(g: &Gloss, manifest: &VideoManifest) -> bool {
    manifest.covers(g)
}

pub fn is_synonym_recoverable(g: &Gloss, manifest: &VideoManifest, syn: &SynonymTable) -> bool {
    !is_hit(g, manifest) && syn.synonyms(g.token()).any(|s| manifest.get(s).is_some())
}

fn occurrences(sequences: &[GlossSequence]) -> impl Iterator<Item = &Gloss> {
    sequences.iter().flat_map(|s| s.glosses.iter())
}

/// Counts every occurrence, repeats included.
pub fn retrieval_report(
    sequences: &[GlossSequence],
    manifest: &VideoManifest,
    syn: &SynonymTable,
    definition: RecallDefinition,
) -> Result<RetrievalReport, MetricError> {
    let (mut n, mut hits, mut recoverable) = (0usize, 0usize, 0usize);
    for g in occurrences(sequences) {
        n += 1;
        if is_hit(g, manifest) {
            hits += 1;
        } else if is_synonym_recoverable(g, manifest, syn) {
            recoverable += 1;
        }
    }
    if n == 0 {
        return Err(MetricError::UndefinedMetric {
            metric: "hit_rate",
            reason: "corpus has no glosses".into(),
        });
    }
    let denom = match definition {
        RecallDefinition::Recoverable => hits + recoverable,
        RecallDefinition::AllGlosses => n,
    };
    Ok(RetrievalReport {
        n_glosses: n,
        n_hits: hits,
        n_synonym_recoverable: recoverable,
        hit_rate: hits as f64 / n as f64,
        recall_at_1: (denom > 0).then(|| hits as f64 / denom as f64),
        recall_definition: definition,
    })
}

pub fn hit_rate(sequences: &[GlossSequence], manifest: &VideoManifest) -> Result<f64, MetricError> {
    retrieval_report(sequences, manifest, &SynonymTable::default(), RecallDefinition::AllGlosses).map(|r| r.hit_rate)
}

pub fn recall_at_1(
    sequences: &[GlossSequence],
    manifest: &VideoManifest,
    syn: &SynonymTable,
    definition: RecallDefinition,
) -> Result<f64, MetricError> {
    retrieval_report(sequences, manifest, syn, definition)?
        .recall_at_1
        .ok_or(MetricError::UndefinedMetric {
            metric: "recall_at_1",
            reason: "no hits and no synonym-recoverable glosses".into(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gloss::Provenance;
    use crate::resolve::{Source, VideoAsset};

    fn manifest(keys: &[&str]) -> VideoManifest {
        VideoManifest::from_assets(keys.iter().map(|k| VideoAsset {
            gloss_key: k.to_string(),
            uri: format!("{k}.mp4"),
            source: Source::Primary,
            duration_ms: None,
        }))
        .unwrap()
    }

    fn corpus(raw: &[&str]) -> Vec<GlossSequence> {
        raw.iter()
            .enumerate()
            .map(|(i, r)| GlossSequence::from_raw(i, r, Provenance::Llm).unwrap())
            .collect()
    }

    #[test]
    fn worked_example() {
        let seqs = corpus(&["CHOCOLATE CHOP ADD DOUGH MIX STIR"]);
        let m = manifest(&["CHOP", "ADD", "COMBINE", "STIR"]);
        let syn = SynonymTable::from_pairs([("MIX", "COMBINE")]);
        assert_eq!(hit_rate(&seqs, &m).unwrap(), 0.5);
        assert_eq!(recall_at_1(&seqs, &m, &syn, RecallDefinition::Recoverable).unwrap(), 0.75);
        assert_eq!(recall_at_1(&seqs, &m, &syn, RecallDefinition::AllGlosses).unwrap(), 0.5);
    }

    #[test]
    fn multiset_and_edges() {
        let m = manifest(&["STIR"]);
        let r = retrieval_report(&corpus(&["STIR STIR", "MIX"]), &m, &SynonymTable::default(), RecallDefinition::Recoverable)
            .unwrap();
        assert_eq!((r.n_hits, r.n_glosses), (2, 3));
        assert!((r.hit_rate - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.recall_at_1, Some(1.0));

        let m = manifest(&["A1"]);
        assert_eq!(
            recall_at_1(&corpus(&["A1 B1"]), &m, &SynonymTable::default(), RecallDefinition::Recoverable).unwrap(),
            1.0
        );
        assert!(hit_rate(&corpus(&[""]), &m).is_err());
        assert!(recall_at_1(&corpus(&["B1"]), &m, &SynonymTable::default(), RecallDefinition::Recoverable).is_err());
    }

    #[test]
    fn fingerspelling_counts_when_letters_exist() {
        let m = manifest(&["T", "O", "F", "U"]);
        assert_eq!(hit_rate(&corpus(&["T-O-F-U TOFU"]), &m).unwrap(), 0.5);
    }
}
