//! Plumbing shared by the binary and the examples: layered configuration,
//! table loading, translator construction, batch compilation, gloss corpora
//! on disk and atomic output.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

use crate::gloss::{GlossError, GlossSequence, Provenance};
use crate::llm::{HttpChatClient, LlmError, LlmRequestConfig, LlmTranslator, TranslationCache};
use crate::metrics::RecallDefinition;
use crate::resolve::{
    compile_task, CompiledTask, CompoundTable, Crucial, FallbackOrder, ManifestError, PosCrucialPolicy, ResolveTables, Resolver,
    SynonymTable, TableError, VideoManifest,
};
use crate::rule::{Lexicon, RuleTranslator};
use crate::task::{load_task_dir, TaskError, TaskSpec};
use crate::translate::{CuratedOverlay, GlossTranslator, ManualTranslator, TranslateError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Gloss(#[from] GlossError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TranslatorKind {
    #[default]
    Rule,
    Llm,
    Manual,
}

impl std::str::FromStr for TranslatorKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rule" => Ok(Self::Rule),
            "llm" => Ok(Self::Llm),
            "manual" => Ok(Self::Manual),
            other => Err(format!("unknown translator `{other}` (rule, llm, manual)")),
        }
    }
}

/// One configuration source. Layers are stacked with [`ConfigLayer::over`];
/// the binary puts flags (with env fallbacks) over the config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigLayer {
    pub tasks: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    pub frequencies: Option<PathBuf>,
    pub compounds: Option<PathBuf>,
    pub translator: Option<TranslatorKind>,
    pub curated: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub offline: Option<bool>,
    pub recall_definition: Option<RecallDefinition>,
    pub fallback_order: Option<FallbackOrder>,
    pub faithful_case_order: Option<bool>,
    pub out: Option<PathBuf>,
    pub log_level: Option<String>,
    pub jobs: Option<usize>,
    pub port: Option<u16>,
    pub asset_base: Option<Url>,
    pub llm: Option<LlmRequestConfig>,
}

impl ConfigLayer {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        toml::from_str(&text).map_err(|e| PipelineError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    /// Fields set in `self` win over `lower`.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            tasks: self.tasks.or(lower.tasks),
            manifest: self.manifest.or(lower.manifest),
            synonyms: self.synonyms.or(lower.synonyms),
            frequencies: self.frequencies.or(lower.frequencies),
            compounds: self.compounds.or(lower.compounds),
            translator: self.translator.or(lower.translator),
            curated: self.curated.or(lower.curated),
            cache: self.cache.or(lower.cache),
            offline: self.offline.or(lower.offline),
            recall_definition: self.recall_definition.or(lower.recall_definition),
            fallback_order: self.fallback_order.or(lower.fallback_order),
            faithful_case_order: self.faithful_case_order.or(lower.faithful_case_order),
            out: self.out.or(lower.out),
            log_level: self.log_level.or(lower.log_level),
            jobs: self.jobs.or(lower.jobs),
            port: self.port.or(lower.port),
            asset_base: self.asset_base.or(lower.asset_base),
            llm: self.llm.or(lower.llm),
        }
    }
}

/// Fully merged settings for one invocation.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub tasks: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    pub frequencies: Option<PathBuf>,
    pub compounds: Option<PathBuf>,
    pub translator: TranslatorKind,
    pub curated: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub offline: bool,
    pub llm: LlmRequestConfig,
    pub recall_definition: RecallDefinition,
    pub fallback_order: FallbackOrder,
    pub faithful_case_order: bool,
    pub out: Option<PathBuf>,
    pub log_level: String,
    pub jobs: Option<usize>,
    pub port: u16,
    pub asset_base: Option<Url>,
}

pub const DEFAULT_PORT: u16 = 8080;

impl PipelineConfig {
    /// Applies defaults, then environment overrides for the LLM settings.
    pub fn from_layer(layer: ConfigLayer) -> Result<Self, PipelineError> {
        let llm = layer.llm.unwrap_or_default().with_env()?;
        llm.validate()?;
        if layer.jobs == Some(0) {
            return Err(PipelineError::Config("jobs must be >= 1".into()));
        }
        Ok(Self {
            tasks: layer.tasks,
            manifest: layer.manifest,
            synonyms: layer.synonyms,
            frequencies: layer.frequencies,
            compounds: layer.compounds,
            translator: layer.translator.unwrap_or_default(),
            curated: layer.curated,
            cache: layer.cache,
            offline: layer.offline.unwrap_or(false),
            llm,
            recall_definition: layer.recall_definition.unwrap_or_default(),
            fallback_order: layer.fallback_order.unwrap_or_default(),
            faithful_case_order: layer.faithful_case_order.unwrap_or(false),
            out: layer.out,
            log_level: layer.log_level.unwrap_or_else(|| "info".into()),
            jobs: layer.jobs,
            port: layer.port.unwrap_or(DEFAULT_PORT),
            asset_base: layer.asset_base,
        })
    }

    /// A required path that must exist when the command starts.
    pub fn existing<'a>(&self, what: &str, path: &'a Option<PathBuf>) -> Result<&'a Path, PipelineError> {
        let p = path
            .as_deref()
            .ok_or_else(|| PipelineError::Config(format!("--{what} is required")))?;
        if !p.exists() {
            return Err(PipelineError::Config(format!("{what} path {} does not exist", p.display())));
        }
        Ok(p)
    }

    fn optional_existing<'a>(&self, what: &str, path: &'a Option<PathBuf>) -> Result<Option<&'a Path>, PipelineError> {
        match path {
            None => Ok(None),
            Some(_) => self.existing(what, path).map(Some),
        }
    }

    pub fn load_tasks(&self) -> Result<Vec<TaskSpec>, PipelineError> {
        Ok(load_task_dir(self.existing("tasks", &self.tasks)?)?)
    }

    pub fn load_manifest(&self) -> Result<VideoManifest, PipelineError> {
        Ok(VideoManifest::load(self.existing("manifest", &self.manifest)?)?)
    }

    pub fn load_synonyms(&self) -> Result<SynonymTable, PipelineError> {
        load_synonyms(
            self.optional_existing("synonyms", &self.synonyms)?,
            self.optional_existing("frequencies", &self.frequencies)?,
        )
    }

    pub fn load_tables(&self) -> Result<ResolveTables, PipelineError> {
        let compounds = match self.optional_existing("compounds", &self.compounds)? {
            Some(p) => CompoundTable::load(p)?,
            None => CompoundTable::default(),
        };
        Ok(ResolveTables {
            manifest: self.load_manifest()?,
            synonyms: self.load_synonyms()?,
            compounds,
        })
    }

    /// Crucial glosses by part of speech under the bundled lexicon.
    pub fn crucial_policy(&self) -> PosCrucialPolicy {
        PosCrucialPolicy::new(Arc::new(Lexicon::bundled().clone()))
    }

    pub fn rule_translator(&self) -> RuleTranslator {
        RuleTranslator::default().faithful_case_order(self.faithful_case_order)
    }

    pub fn llm_translator(&self) -> Result<LlmTranslator, PipelineError> {
        let dir = self
            .cache
            .as_deref()
            .ok_or_else(|| PipelineError::Config("--cache is required for the llm translator".into()))?;
        let cache = Arc::new(TranslationCache::open(dir)?);
        let client: Option<Arc<dyn crate::llm::ChatClient>> = if self.offline {
            None
        } else {
            match HttpChatClient::from_config(&self.llm) {
                Ok(c) => Some(Arc::new(c)),
                Err(e) => {
                    tracing::debug!(error = %e, "no LLM client; only cached translations are available");
                    None
                }
            }
        };
        Ok(LlmTranslator::new(self.llm.clone(), cache, client)?.offline(self.offline))
    }

    /// The configured strategy, wrapped in the curated overlay when a curated
    /// directory is set.
    pub fn translator(&self) -> Result<Box<dyn GlossTranslator>, PipelineError> {
        let base: Box<dyn GlossTranslator> = match self.translator {
            TranslatorKind::Rule => Box::new(self.rule_translator()),
            TranslatorKind::Llm => Box::new(self.llm_translator()?),
            TranslatorKind::Manual => {
                let dir = self.existing("curated", &self.curated)?;
                return Ok(Box::new(ManualTranslator { dir: dir.to_path_buf() }));
            }
        };
        Ok(match self.optional_existing("curated", &self.curated)? {
            Some(dir) => Box::new(CuratedOverlay::new(dir, base)),
            None => base,
        })
    }
}

pub fn load_synonyms(synonyms: Option<&Path>, frequencies: Option<&Path>) -> Result<SynonymTable, PipelineError> {
    let mut t = match synonyms {
        Some(p) => SynonymTable::load(p)?,
        None => SynonymTable::default(),
    };
    if let Some(p) = frequencies {
        t.load_frequencies(std::fs::File::open(p).map_err(io_err(p))?)?;
    }
    Ok(t)
}

fn pool(jobs: Option<usize>) -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        b = b.num_threads(n);
    }
    b.build().expect("thread pool")
}

/// Compiles every task; at most `jobs` workers. Each task gets its own
/// resolver memo, so output does not depend on scheduling.
pub fn compile_all(
    tasks: &[TaskSpec],
    translator: &dyn GlossTranslator,
    tables: &ResolveTables,
    crucial: &dyn Crucial,
    order: FallbackOrder,
    jobs: Option<usize>,
) -> Vec<CompiledTask> {
    use rayon::prelude::*;
    pool(jobs).install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let mut resolver = Resolver::new(tables, crucial, order);
                compile_task(t, translator, &mut resolver)
            })
            .collect()
    })
}

/// Writes via a temp file in the same directory and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| PipelineError::Io {
        path: path.display().to_string(),
        source: e.error,
    })?;
    Ok(())
}

/// One `<task_id>.json` per task.
pub fn write_compiled(dir: &Path, compiled: &[CompiledTask]) -> Result<Vec<PathBuf>, PipelineError> {
    compiled
        .iter()
        .map(|c| {
            let path = dir.join(format!("{}.json", c.task_id()));
            write_atomic(&path, c.to_json().as_bytes())?;
            Ok(path)
        })
        .collect()
}

pub fn read_compiled_dir(dir: &Path) -> Result<Vec<CompiledTask>, PipelineError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(io_err(p))?;
            serde_json::from_str(&text).map_err(|e| PipelineError::Parse {
                path: p.display().to_string(),
                message: e.to_string(),
            })
        })
        .collect()
}

/// One translated step in a gloss corpus file (JSON Lines).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlossRecord {
    pub task_id: String,
    pub step_index: usize,
    pub provenance: Provenance,
    pub glosses: String,
}

impl GlossRecord {
    pub fn of(task_id: &str, seq: &GlossSequence) -> Self {
        Self {
            task_id: task_id.to_string(),
            step_index: seq.step_index,
            provenance: seq.provenance,
            glosses: seq.render(),
        }
    }

    pub fn sequence(&self) -> Result<GlossSequence, GlossError> {
        GlossSequence::from_raw(self.step_index, &self.glosses, self.provenance)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranslationFailure {
    pub task_id: String,
    pub step_index: Option<usize>,
    pub error: String,
}

/// Translates every task into corpus records; failures are collected rather
/// than aborting the batch.
pub fn translate_corpus(
    tasks: &[TaskSpec],
    translator: &dyn GlossTranslator,
    jobs: Option<usize>,
) -> (Vec<GlossRecord>, Vec<TranslationFailure>) {
    use rayon::prelude::*;
    let per_task: Vec<(Vec<GlossRecord>, Vec<TranslationFailure>)> = pool(jobs).install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let mut ok = Vec::new();
                let mut failed = Vec::new();
                match translator.translate_task(t) {
                    Err(e) => failed.push(TranslationFailure {
                        task_id: t.task_id.clone(),
                        step_index: None,
                        error: e.to_string(),
                    }),
                    Ok(steps) => {
                        for (step, r) in t.steps.iter().zip(steps) {
                            match r {
                                Ok(seq) => ok.push(GlossRecord::of(&t.task_id, &seq)),
                                Err(e) => failed.push(TranslationFailure {
                                    task_id: t.task_id.clone(),
                                    step_index: Some(step.index),
                                    error: e.to_string(),
                                }),
                            }
                        }
                    }
                }
                (ok, failed)
            })
            .collect()
    });
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (r, f) in per_task {
        records.extend(r);
        failures.extend(f);
    }
    (records, failures)
}

pub fn corpus_to_jsonl(records: &[GlossRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn read_corpus(path: &Path) -> Result<Vec<GlossRecord>, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| PipelineError::Parse {
                path: format!("{}:{}", path.display(), i + 1),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Gloss records from a corpus file or a directory of compiled tasks.
pub fn load_gloss_source(path: &Path) -> Result<Vec<GlossRecord>, PipelineError> {
    if path.is_dir() {
        Ok(read_compiled_dir(path)?
            .iter()
            .flat_map(|c| c.glosses().map(|s| GlossRecord::of(c.task_id(), s)).collect::<Vec<_>>())
            .collect())
    } else {
        read_corpus(path)
    }
}

pub fn sequences(records: &[GlossRecord]) -> Result<Vec<GlossSequence>, PipelineError> {
    records.iter().map(|r| r.sequence().map_err(Into::into)).collect()
}
