//! Translator strategies behind one interface: rule-based, LLM, and the
//! curated overlay that replaces either with hand-corrected glosses.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::gloss::{GlossError, GlossSequence, Provenance};
use crate::llm::{parse_llm_response, LlmError};
use crate::rule::{RuleError, RuleTranslator};
use crate::task::TaskSpec;

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Gloss(#[from] GlossError),
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error("curated overlay {path}: {message}")]
    Curated { path: String, message: String },
}

/// Outcome for one step; other steps are unaffected by a failure here.
pub type StepResult = Result<GlossSequence, TranslateError>;

pub trait GlossTranslator: Send + Sync {
    fn name(&self) -> &'static str;

    /// One result per step, in step order. `Err` means the whole task failed
    /// (no step could be translated).
    fn translate_task(&self, task: &TaskSpec) -> Result<Vec<StepResult>, TranslateError>;
}

impl<T: GlossTranslator + ?Sized> GlossTranslator for Box<T> {
    fn name(&self) -> &'static str {
        (**self).name()
    }

    fn translate_task(&self, task: &TaskSpec) -> Result<Vec<StepResult>, TranslateError> {
        (**self).translate_task(task)
    }
}

impl GlossTranslator for RuleTranslator {
    fn name(&self) -> &'static str {
        "rule"
    }

    fn translate_task(&self, task: &TaskSpec) -> Result<Vec<StepResult>, TranslateError> {
        Ok(task
            .steps
            .iter()
            .map(|s| self.translate_step(s.index, &s.text).map_err(TranslateError::from))
            .collect())
    }
}

/// Uses `curated/<task_id>.json` when it exists, the inner translator
/// otherwise. The file holds one gloss string per step, in the same shapes
/// accepted from the LLM.
pub struct CuratedOverlay<T> {
    dir: PathBuf,
    inner: T,
}

impl<T: GlossTranslator> CuratedOverlay<T> {
    pub fn new(dir: impl Into<PathBuf>, inner: T) -> Self {
        Self {
            dir: dir.into(),
            inner,
        }
    }

    pub fn path_for(&self, task_id: &str) -> PathBuf {
        self.dir.join(format!("{task_id}.json"))
    }
}

/// Reads a curated file for `task`, or `None` if there is none.
pub fn load_curated(path: &Path, task: &TaskSpec) -> Result<Option<Vec<StepResult>>, TranslateError> {
    let raw = match std::fs::read_to_string(path) {
        Ok(raw) => raw,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => {
            return Err(TranslateError::Curated {
                path: path.display().to_string(),
                message: e.to_string(),
            })
        }
    };
    let steps = parse_llm_response(&raw, task.steps.len()).map_err(|e| TranslateError::Curated {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(Some(
        steps
            .iter()
            .zip(&task.steps)
            .map(|(s, step)| GlossSequence::from_raw(step.index, s, Provenance::Manual).map_err(Into::into))
            .collect(),
    ))
}

impl<T: GlossTranslator> GlossTranslator for CuratedOverlay<T> {
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn translate_task(&self, task: &TaskSpec) -> Result<Vec<StepResult>, TranslateError> {
        match load_curated(&self.path_for(&task.task_id), task)? {
            Some(steps) => Ok(steps),
            None => self.inner.translate_task(task),
        }
    }
}

/// Curated files only; a task without one fails.
pub struct ManualTranslator {
    pub dir: PathBuf,
}

impl GlossTranslator for ManualTranslator {
    fn name(&self) -> &'static str {
        "manual"
    }

    fn translate_task(&self, task: &TaskSpec) -> Result<Vec<StepResult>, TranslateError> {
        let path = self.dir.join(format!("{}.json", task.task_id));
        load_curated(&path, task)?.ok_or_else(|| TranslateError::Curated {
            path: path.display().to_string(),
            message: "no curated translation for this task".into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::load_tasks;

    fn task() -> TaskSpec {
        load_tasks(
            br#"{"task_id":"t","title":"T","steps":[{"text":"Fold the paper."},{"text":"Crease it."}]}"#,
            "1",
        )
        .unwrap()
        .remove(0)
    }

    #[test]
    fn rule_translator_runs_per_step() {
        let out = RuleTranslator::default().translate_task(&task()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].as_ref().unwrap().render(), "FOLD PAPER");
        assert_eq!(out[1].as_ref().unwrap().step_index, 1);
    }

    #[test]
    fn overlay_wins_when_present() {
        let dir = tempfile::tempdir().unwrap();
        let overlay = CuratedOverlay::new(dir.path(), RuleTranslator::default());
        let out = overlay.translate_task(&task()).unwrap();
        assert_eq!(out[0].as_ref().unwrap().provenance, Provenance::Rule);

        std::fs::write(dir.path().join("t.json"), r#"["PAPER FOLD", "CREASE"]"#).unwrap();
        let out = overlay.translate_task(&task()).unwrap();
        let first = out[0].as_ref().unwrap();
        assert_eq!(first.render(), "PAPER FOLD");
        assert_eq!(first.provenance, Provenance::Manual);

        std::fs::write(dir.path().join("t.json"), r#"["ONLY ONE"]"#).unwrap();
        assert!(overlay.translate_task(&task()).is_err());
        assert!(ManualTranslator { dir: dir.path().join("nope") }.translate_task(&task()).is_err());
    }
}
