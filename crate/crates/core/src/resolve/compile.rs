//! Whole-task compilation: translate, normalize, resolve, stitch.

use serde::{Deserialize, Serialize};

use super::{stitch, Playlist, ResolvedStep, Resolver};
use crate::gloss::GlossSequence;
use crate::task::TaskSpec;
use crate::translate::GlossTranslator;

pub const COMPILED_FORMAT: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StepStatus {
    Ok,
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledStep {
    pub step_index: usize,
    pub text: String,
    pub image: Option<String>,
    pub glosses: Option<GlossSequence>,
    pub resolved: Option<ResolvedStep>,
    pub playlist: Option<Playlist>,
    #[serde(flatten)]
    pub status: StepStatus,
}

impl CompiledStep {
    pub fn is_ok(&self) -> bool {
        self.status == StepStatus::Ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledTask {
    pub format: String,
    pub translator: String,
    pub task: TaskSpec,
    pub steps: Vec<CompiledStep>,
}

impl CompiledTask {
    pub fn task_id(&self) -> &str {
        &self.task.task_id
    }

    /// True when every step has a playlist.
    pub fn fully_signed(&self) -> bool {
        self.steps.iter().all(CompiledStep::is_ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = (usize, &str)> {
        self.steps.iter().filter_map(|s| match &s.status {
            StepStatus::Failed { error } => Some((s.step_index, error.as_str())),
            StepStatus::Ok => None,
        })
    }

    pub fn glosses(&self) -> impl Iterator<Item = &GlossSequence> {
        self.steps.iter().filter_map(|s| s.glosses.as_ref())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("compiled task serializes");
        s.push('\n');
        s
    }
}

fn failed(step: &crate::task::InstructionStep, glosses: Option<GlossSequence>, error: String) -> CompiledStep {
    CompiledStep {
        step_index: step.index,
        text: step.text.clone(),
        image: step.image.clone(),
        glosses,
        resolved: None,
        playlist: None,
        status: StepStatus::Failed { error },
    }
}

/// Translates every step, resolves each gloss and stitches playlists. Step
/// failures are recorded in place and never stop the other steps.
pub fn compile_task(task: &TaskSpec, translator: &dyn GlossTranslator, resolver: &mut Resolver<'_>) -> CompiledTask {
    let translated = translator.translate_task(task);
    let steps = task
        .steps
        .iter()
        .enumerate()
        .map(|(i, step)| {
            let seq = match &translated {
                Err(e) => return failed(step, None, format!("translation failed: {e}")),
                Ok(per_step) => match per_step.get(i) {
                    Some(Ok(seq)) => seq.clone(),
                    Some(Err(e)) => return failed(step, None, e.to_string()),
                    None => return failed(step, None, "translator returned too few steps".into()),
                },
            };
            if seq.glosses.is_empty() {
                return failed(step, Some(seq), "empty translation".into());
            }
            match resolver.resolve_step(&seq) {
                Ok(resolved) => CompiledStep {
                    step_index: step.index,
                    text: step.text.clone(),
                    image: step.image.clone(),
                    playlist: Some(stitch(&resolved)),
                    glosses: Some(seq),
                    resolved: Some(resolved),
                    status: StepStatus::Ok,
                },
                Err(e) => failed(step, Some(seq), e.to_string()),
            }
        })
        .collect();
    CompiledTask {
        format: COMPILED_FORMAT.into(),
        translator: translator.name().into(),
        task: task.clone(),
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolve::{AllCrucial, FallbackOrder, ResolveTables, Source, VideoAsset, VideoManifest};
    use crate::rule::RuleTranslator;
    use crate::task::load_tasks;

    fn tables(keys: &[&str]) -> ResolveTables {
        ResolveTables {
            manifest: VideoManifest::from_assets(keys.iter().map(|k| VideoAsset {
                gloss_key: k.to_string(),
                uri: format!("v/{k}.mp4"),
                source: Source::Primary,
                duration_ms: None,
            }))
            .unwrap(),
            ..Default::default()
        }
    }

    #[test]
    fn failures_are_isolated() {
        let task = load_tasks(
            br#"{"task_id":"t","title":"T","steps":[{"text":"Fold the paper.","image":"img/0.png"},{"text":"Crease it."},{"text":"Fold."}]}"#,
            "1",
        )
        .unwrap()
        .remove(0);
        let t = tables(&["FOLD", "PAPER"]);
        let mut resolver = Resolver::new(&t, &AllCrucial(true), FallbackOrder::default());
        let c = compile_task(&task, &RuleTranslator::default(), &mut resolver);
        assert_eq!(c.steps.len(), 3);
        assert!(c.steps[0].is_ok());
        assert_eq!(c.steps[0].image.as_deref(), Some("img/0.png"));
        assert_eq!(c.steps[0].playlist.as_ref().unwrap().segments, ["v/FOLD.mp4", "v/PAPER.mp4"]);
        // CREASE is crucial and has no video, letters or synonym
        assert!(!c.steps[1].is_ok());
        assert!(c.steps[2].is_ok());
        assert_eq!(c.failures().count(), 1);
        assert!(!c.fully_signed());

        let again = compile_task(
            &task,
            &RuleTranslator::default(),
            &mut Resolver::new(&t, &AllCrucial(true), FallbackOrder::default()),
        );
        assert_eq!(c.to_json(), again.to_json());
        let back: CompiledTask = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }
}
