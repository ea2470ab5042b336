//! Hit rate and Recall@1 as the video set grows.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::retrieval::{retrieval_report, RecallDefinition};
use super::MetricError;
use crate::gloss::GlossSequence;
use crate::resolve::{SynonymTable, VideoManifest};

pub const MIN_RANDOM_SEEDS: usize = 5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsetPolicy {
    /// Most frequent corpus glosses first, ties broken lexicographically.
    #[default]
    FrequencyDescending,
    /// Uniform shuffle per seed.
    RandomSeeded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub video_count: usize,
    pub hit_rate: f64,
    pub recall_at_1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRun {
    pub seed: Option<u64>,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    pub strategy: String,
    pub policy: SubsetPolicy,
    pub recall_definition: RecallDefinition,
    pub runs: Vec<CurveRun>,
    /// Pointwise mean over runs. Recall is averaged over the runs where it
    /// is defined.
    pub mean: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveOptions {
    pub policy: SubsetPolicy,
    pub seeds: Vec<u64>,
    /// Points at `step, 2*step, ...` and always at the full size.
    pub step: usize,
    pub recall_definition: RecallDefinition,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self {
            policy: SubsetPolicy::FrequencyDescending,
            seeds: (0..MIN_RANDOM_SEEDS as u64).collect(),
            step: 10,
            recall_definition: RecallDefinition::Recoverable,
        }
    }
}

pub fn curve_sizes(total: usize, step: usize) -> Vec<usize> {
    let step = step.max(1);
    let mut sizes: Vec<usize> = (1..).map(|k| k * step).take_while(|&s| s < total).collect();
    sizes.push(total);
    sizes
}

/// Manifest entry keys (letter clips excluded) in the order they are added.
pub fn subset_order(
    sequences: &[GlossSequence],
    manifest: &VideoManifest,
    policy: SubsetPolicy,
    seed: Option<u64>,
) -> Vec<String> {
    let mut keys: Vec<String> = manifest.entry_keys().map(str::to_string).collect();
    match policy {
        SubsetPolicy::FrequencyDescending => {
            let mut freq: HashMap<&str, usize> = HashMap::new();
            for t in sequences.iter().flat_map(|s| s.tokens()) {
                *freq.entry(t).or_insert(0) += 1;
            }
            keys.sort_by(|a, b| {
                let fa = freq.get(a.as_str()).copied().unwrap_or(0);
                let fb = freq.get(b.as_str()).copied().unwrap_or(0);
                fb.cmp(&fa).then_with(|| a.cmp(b))
            });
        }
        SubsetPolicy::RandomSeeded => {
            keys.sort();
            keys.shuffle(&mut ChaCha8Rng::seed_from_u64(seed.unwrap_or(0)));
        }
    }
    keys
}

fn run(
    sequences: &[GlossSequence],
    manifest: &VideoManifest,
    syn: &SynonymTable,
    opts: &CurveOptions,
    seed: Option<u64>,
) -> Result<CurveRun, MetricError> {
    let order = subset_order(sequences, manifest, opts.policy, seed);
    let points = curve_sizes(order.len(), opts.step)
        .into_par_iter()
        .map(|k| {
            let sub = manifest.subset(order[..k].iter().map(String::as_str));
            let r = retrieval_report(sequences, &sub, syn, opts.recall_definition)?;
            Ok(CurvePoint {
                video_count: k,
                hit_rate: r.hit_rate,
                recall_at_1: r.recall_at_1,
            })
        })
        .collect::<Result<Vec<_>, MetricError>>()?;
    Ok(CurveRun { seed, points })
}

fn mean(runs: &[CurveRun]) -> Vec<CurvePoint> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    (0..first.points.len())
        .map(|i| {
            let hit = runs.iter().map(|r| r.points[i].hit_rate).sum::<f64>() / runs.len() as f64;
            let rec: Vec<f64> = runs.iter().filter_map(|r| r.points[i].recall_at_1).collect();
            CurvePoint {
                video_count: first.points[i].video_count,
                hit_rate: hit,
                recall_at_1: (!rec.is_empty()).then(|| rec.iter().sum::<f64>() / rec.len() as f64),
            }
        })
        .collect()
}

/// Evaluates nested manifest subsets. Letter clips are present at every size;
/// `video_count` counts the other entries only.
pub fn coverage_curve(
    strategy: &str,
    sequences: &[GlossSequence],
    manifest: &VideoManifest,
    syn: &SynonymTable,
    opts: &CurveOptions,
) -> Result<CoverageCurve, MetricError> {
    if manifest.is_empty() {
        return Err(MetricError::InvalidArgument("manifest has no entries".into()));
    }
    let seeds: Vec<Option<u64>> = match opts.policy {
        SubsetPolicy::FrequencyDescending => vec![None],
        SubsetPolicy::RandomSeeded => {
            if opts.seeds.len() < MIN_RANDOM_SEEDS {
                return Err(MetricError::InvalidArgument(format!(
                    "random subsets need at least {MIN_RANDOM_SEEDS} seeds, got {}",
                    opts.seeds.len()
                )));
            }
            opts.seeds.iter().copied().map(Some).collect()
        }
    };
    let runs = seeds
        .into_par_iter()
        .map(|seed| run(sequences, manifest, syn, opts, seed))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CoverageCurve {
        strategy: strategy.to_string(),
        policy: opts.policy,
        recall_definition: opts.recall_definition,
        mean: mean(&runs),
        runs,
    })
}

/// Long format: `size,metric,strategy,seed,value`. Seeded runs also get
/// `seed=mean` rows; recall rows are omitted where undefined.
pub fn curves_to_csv(curves: &[CoverageCurve]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["size", "metric", "strategy", "seed", "value"]).expect("in-memory write");
    let mut emit = |p: &CurvePoint, strategy: &str, seed: &str| {
        let mut row = |metric: &str, v: f64| {
            w.write_record([&p.video_count.to_string(), metric, strategy, seed, &format!("{v}")])
                .expect("in-memory write");
        };
        row("hit_rate", p.hit_rate);
        if let Some(r) = p.recall_at_1 {
            row("recall_at_1", r);
        }
    };
    for c in curves {
        for r in &c.runs {
            let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
            for p in &r.points {
                emit(p, &c.strategy, &seed);
            }
        }
        if c.policy == SubsetPolicy::RandomSeeded {
            for p in &c.mean {
                emit(p, &c.strategy, "mean");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
