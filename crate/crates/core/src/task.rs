//! Task documents: recipes and how-to guides with ordered English steps.
//!
//! The on-disk schema is a single JSON object (or an array of them):
//!
//! ```json
//! {
//!   "task_id": "classic-blondies",
//!   "title": "Classic Blondies",
//!   "domain": "recipe",
//!   "main_image": "images/blondies.jpg",
//!   "ingredients": [{"name": "butter", "quantity_text": "1/2 cup"}],
//!   "task_texts": ["Preheat the oven to 350 degrees.", "..."],
//!   "images": ["images/blondies-1.jpg", null]
//! }
//! ```
//!
//! A `steps` array of `{index, text, image}` objects is accepted in place of
//! `task_texts`/`images`. Unknown fields are kept in [`TaskSpec::extras`].

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("malformed task document{}: {message}", source_label(.source_name))]
    MalformedDocument {
        source_name: Option<String>,
        message: String,
    },
    #[error("task `{task_id}`: schema violation at {path}: {message}")]
    SchemaViolation {
        task_id: String,
        path: String,
        message: String,
    },
    #[error("unsupported task format version `{0}` (expected `{FORMAT_VERSION}`)")]
    UnsupportedVersion(String),
    #[error("duplicate task id `{0}` in collection")]
    DuplicateId(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn source_label(name: &Option<String>) -> String {
    name.as_ref().map(|n| format!(" in {n}")).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Recipe,
    Howto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngredientLine {
    pub name: String,
    #[serde(default)]
    pub quantity_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstructionStep {
    pub index: usize,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    /// Ingredient names shown next to this step. `None` means the full list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relevant_ingredients: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub task_id: String,
    pub title: String,
    pub domain: Domain,
    pub main_image: Option<String>,
    pub ingredients: Vec<IngredientLine>,
    pub steps: Vec<InstructionStep>,
    pub extras: BTreeMap<String, Value>,
}

impl TaskSpec {
    pub fn step_texts(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().map(|s| s.text.as_str())
    }

    /// Renders the task back into the canonical document schema.
    pub fn to_document(&self) -> Value {
        let mut doc = serde_json::Map::new();
        for (k, v) in &self.extras {
            doc.insert(k.clone(), v.clone());
        }
        doc.insert("task_id".into(), Value::String(self.task_id.clone()));
        doc.insert("title".into(), Value::String(self.title.clone()));
        doc.insert(
            "domain".into(),
            serde_json::to_value(self.domain).expect("domain serializes"),
        );
        doc.insert(
            "main_image".into(),
            self.main_image.clone().map(Value::String).unwrap_or(Value::Null),
        );
        doc.insert(
            "ingredients".into(),
            serde_json::to_value(&self.ingredients).expect("ingredients serialize"),
        );
        doc.insert(
            "task_texts".into(),
            Value::Array(self.steps.iter().map(|s| Value::String(s.text.clone())).collect()),
        );
        doc.insert(
            "images".into(),
            Value::Array(
                self.steps
                    .iter()
                    .map(|s| s.image.clone().map(Value::String).unwrap_or(Value::Null))
                    .collect(),
            ),
        );
        if self.steps.iter().any(|s| s.relevant_ingredients.is_some()) {
            doc.insert(
                "relevant_ingredients".into(),
                Value::Array(
                    self.steps
                        .iter()
                        .map(|s| {
                            serde_json::to_value(&s.relevant_ingredients)
                                .expect("ingredient names serialize")
                        })
                        .collect(),
                ),
            );
        }
        Value::Object(doc)
    }
}

#[derive(Debug, Deserialize)]
struct RawStep {
    index: Option<usize>,
    text: Option<String>,
    image: Option<String>,
    relevant_ingredients: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
struct RawTask {
    task_id: Option<String>,
    title: Option<String>,
    domain: Option<Domain>,
    main_image: Option<String>,
    #[serde(default)]
    ingredients: Vec<IngredientLine>,
    task_texts: Option<Vec<String>>,
    images: Option<Vec<Option<String>>>,
    relevant_ingredients: Option<Vec<Option<Vec<String>>>>,
    steps: Option<Vec<RawStep>>,
    #[serde(flatten)]
    extras: BTreeMap<String, Value>,
}

/// Lowercase, hyphen-separated id derived from a title.
pub fn slugify(title: &str) -> String {
    let mut out = String::new();
    for ch in title.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.is_empty() && !out.ends_with('-') {
            out.push('-');
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}

fn violation(task_id: &str, path: impl Into<String>, message: impl Into<String>) -> TaskError {
    TaskError::SchemaViolation {
        task_id: task_id.to_string(),
        path: path.into(),
        message: message.into(),
    }
}

impl RawTask {
    fn into_spec(self, position: usize, fallback_id: Option<&str>) -> Result<TaskSpec, TaskError> {
        let title = self.title.map(|t| t.trim().to_string()).unwrap_or_default();
        let task_id = self
            .task_id
            .or_else(|| fallback_id.map(str::to_string))
            .unwrap_or_else(|| {
                let slug = slugify(&title);
                if slug.is_empty() {
                    format!("task-{position}")
                } else {
                    slug
                }
            });
        let here = format!("$[{position}]");
        if title.is_empty() {
            return Err(violation(&task_id, format!("{here}.title"), "missing or empty title"));
        }

        let steps = match (self.task_texts, self.steps) {
            (Some(_), Some(_)) => {
                return Err(violation(
                    &task_id,
                    &here,
                    "document has both `task_texts` and `steps`",
                ))
            }
            (None, None) => {
                return Err(violation(&task_id, format!("{here}.task_texts"), "missing steps"))
            }
            (Some(texts), None) => {
                let images = self.images.unwrap_or_default();
                if !images.is_empty() && images.len() != texts.len() {
                    return Err(violation(
                        &task_id,
                        format!("{here}.images"),
                        format!("{} images for {} steps", images.len(), texts.len()),
                    ));
                }
                let relevant = self.relevant_ingredients.unwrap_or_default();
                if !relevant.is_empty() && relevant.len() != texts.len() {
                    return Err(violation(
                        &task_id,
                        format!("{here}.relevant_ingredients"),
                        format!("{} entries for {} steps", relevant.len(), texts.len()),
                    ));
                }
                texts
                    .into_iter()
                    .enumerate()
                    .map(|(i, text)| InstructionStep {
                        index: i,
                        text,
                        image: images.get(i).cloned().flatten(),
                        relevant_ingredients: relevant.get(i).cloned().flatten(),
                    })
                    .collect::<Vec<_>>()
            }
            (None, Some(raw_steps)) => {
                let mut out = Vec::with_capacity(raw_steps.len());
                for (i, step) in raw_steps.into_iter().enumerate() {
                    let index = step.index.unwrap_or(i);
                    if index != i {
                        return Err(violation(
                            &task_id,
                            format!("{here}.steps[{i}].index"),
                            format!("non-contiguous step index: expected {i}, found {index}"),
                        ));
                    }
                    out.push(InstructionStep {
                        index,
                        text: step.text.unwrap_or_default(),
                        image: step.image,
                        relevant_ingredients: step.relevant_ingredients,
                    });
                }
                out
            }
        };

        if steps.is_empty() {
            return Err(violation(&task_id, format!("{here}.task_texts"), "task has no steps"));
        }
        for step in &steps {
            if step.text.trim().is_empty() {
                return Err(violation(
                    &task_id,
                    format!("{here}.task_texts[{}]", step.index),
                    "empty step text",
                ));
            }
        }
        for (i, ing) in self.ingredients.iter().enumerate() {
            if ing.name.trim().is_empty() {
                return Err(violation(
                    &task_id,
                    format!("{here}.ingredients[{i}].name"),
                    "empty ingredient name",
                ));
            }
        }

        let domain = self.domain.unwrap_or(if self.ingredients.is_empty() {
            Domain::Howto
        } else {
            Domain::Recipe
        });
        if domain == Domain::Howto && !self.ingredients.is_empty() {
            return Err(violation(
                &task_id,
                format!("{here}.ingredients"),
                "how-to tasks carry no ingredients",
            ));
        }

        Ok(TaskSpec {
            task_id,
            title,
            domain,
            main_image: self.main_image,
            ingredients: self.ingredients,
            steps,
            extras: self.extras,
        })
    }
}

/// Parses a task document (one object or an array of objects).
pub fn load_tasks(source: &[u8], format_version: &str) -> Result<Vec<TaskSpec>, TaskError> {
    load_tasks_named(source, format_version, None)
}

fn load_tasks_named(
    source: &[u8],
    format_version: &str,
    name: Option<&str>,
) -> Result<Vec<TaskSpec>, TaskError> {
    if format_version != FORMAT_VERSION {
        return Err(TaskError::UnsupportedVersion(format_version.to_string()));
    }
    let malformed = |message: String| TaskError::MalformedDocument {
        source_name: name.map(str::to_string),
        message,
    };
    let text = std::str::from_utf8(source).map_err(|e| malformed(e.to_string()))?;
    let value: Value = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    let (items, single) = match value {
        Value::Array(items) => (items, false),
        obj @ Value::Object(_) => (vec![obj], true),
        other => return Err(malformed(format!("expected object or array, found {other}"))),
    };
    let mut tasks = Vec::with_capacity(items.len());
    for (position, item) in items.into_iter().enumerate() {
        let raw: RawTask = serde_json::from_value(item).map_err(|e| TaskError::SchemaViolation {
            task_id: name.unwrap_or("<unknown>").to_string(),
            path: format!("$[{position}]"),
            message: e.to_string(),
        })?;
        let fallback = if single { name } else { None };
        tasks.push(raw.into_spec(position, fallback)?);
    }
    Ok(tasks)
}

/// Loads every `*.json` file in `dir` (sorted by file name). A single-object
/// file without `task_id` takes its file stem as the id.
pub fn load_task_dir(dir: &Path) -> Result<Vec<TaskSpec>, TaskError> {
    let io_err = |path: &Path, source| TaskError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut files: Vec<_> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut tasks = Vec::new();
    let mut seen = BTreeSet::new();
    for path in files {
        let bytes = fs::read(&path).map_err(|e| io_err(&path, e))?;
        let stem = path.file_stem().and_then(|s| s.to_str());
        for task in load_tasks_named(&bytes, FORMAT_VERSION, stem)? {
            if !seen.insert(task.task_id.clone()) {
                return Err(TaskError::DuplicateId(task.task_id));
            }
            tasks.push(task);
        }
    }
    Ok(tasks)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    DuplicateTaskId { task_id: String },
    EmptyStep { task_id: String, step_index: usize },
    DanglingImage { task_id: String, path: String, uri: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }
}

// Syntactic only: absolute URLs must parse, relative references must be
// non-empty paths without whitespace.
fn image_uri_ok(uri: &str) -> bool {
    if uri.trim().is_empty() || uri.chars().any(char::is_whitespace) {
        return false;
    }
    match url::Url::parse(uri) {
        Ok(_) => true,
        Err(url::ParseError::RelativeUrlWithoutBase) => true,
        Err(_) => false,
    }
}

pub fn validate_collection(tasks: &[TaskSpec]) -> ValidationReport {
    let mut findings = Vec::new();
    let mut seen = BTreeSet::new();
    let mut reported = BTreeSet::new();
    for task in tasks {
        if !seen.insert(task.task_id.as_str()) && reported.insert(task.task_id.as_str()) {
            findings.push(Finding::DuplicateTaskId {
                task_id: task.task_id.clone(),
            });
        }
        for step in &task.steps {
            if step.text.trim().is_empty() {
                findings.push(Finding::EmptyStep {
                    task_id: task.task_id.clone(),
                    step_index: step.index,
                });
            }
        }
        let images = task
            .main_image
            .iter()
            .map(|u| ("main_image".to_string(), u))
            .chain(
                task.steps
                    .iter()
                    .filter_map(|s| s.image.as_ref().map(|u| (format!("images[{}]", s.index), u))),
            );
        for (path, uri) in images {
            if !image_uri_ok(uri) {
                findings.push(Finding::DanglingImage {
                    task_id: task.task_id.clone(),
                    path,
                    uri: uri.clone(),
                });
            }
        }
    }
    ValidationReport { findings }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let tasks =
            load_tasks(br#"{"title":"T","steps":[{"index":0,"text":"Fold."}]}"#, "1").unwrap();
        assert_eq!(tasks.len(), 1);
        let t = &tasks[0];
        assert_eq!(t.domain, Domain::Howto);
        assert!(t.ingredients.is_empty());
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].text, "Fold.");
        assert_eq!(t.task_id, "t");
    }

    #[test]
    fn index_gap_is_rejected() {
        let err = load_tasks(
            br#"{"task_id":"gap","title":"T","steps":[{"index":0,"text":"A."},{"index":2,"text":"B."}]}"#,
            "1",
        )
        .unwrap_err();
        match err {
            TaskError::SchemaViolation { task_id, path, message } => {
                assert_eq!(task_id, "gap");
                assert_eq!(path, "$[0].steps[1].index");
                assert!(message.contains("expected 1, found 2"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn not_json() {
        assert!(matches!(
            load_tasks(b"{title", "1"),
            Err(TaskError::MalformedDocument { .. })
        ));
    }

    #[test]
    fn missing_title_and_empty_step() {
        assert!(matches!(
            load_tasks(br#"{"task_texts":["a"]}"#, "1"),
            Err(TaskError::SchemaViolation { .. })
        ));
        let err = load_tasks(br#"{"task_id":"x","title":"X","task_texts":["ok", "  "]}"#, "1")
            .unwrap_err();
        assert!(err.to_string().contains("task_texts[1]"), "{err}");
        assert!(err.to_string().contains("`x`"), "{err}");
    }

    #[test]
    fn howto_with_ingredients_rejected() {
        let doc = br#"{"title":"X","domain":"howto","ingredients":[{"name":"a"}],"task_texts":["Go."]}"#;
        assert!(load_tasks(doc, "1").is_err());
    }

    #[test]
    fn extras_and_round_trip() {
        let doc = br#"[{"task_id":"b","title":"B","ingredients":[{"name":"egg","quantity_text":"1"}],
            "task_texts":["Crack the egg.","Whisk."],"images":["1.jpg",null],"source_url":"http://x"}]"#;
        let tasks = load_tasks(doc, "1").unwrap();
        assert_eq!(tasks[0].domain, Domain::Recipe);
        assert_eq!(tasks[0].extras["source_url"], "http://x");
        let again = serde_json::to_vec(&tasks[0].to_document()).unwrap();
        assert_eq!(load_tasks(&again, "1").unwrap(), tasks);
    }

    #[test]
    fn wrong_version() {
        assert!(matches!(
            load_tasks(b"{}", "2"),
            Err(TaskError::UnsupportedVersion(_))
        ));
    }

    #[test]
    fn collection_report() {
        assert!(validate_collection(&[]).is_clean());
        let t = load_tasks(br#"{"task_id":"t1","title":"A","task_texts":["Go."]}"#, "1")
            .unwrap()
            .remove(0);
        let report = validate_collection(&[t.clone(), t.clone()]);
        assert_eq!(
            report.findings,
            vec![Finding::DuplicateTaskId { task_id: "t1".into() }]
        );
        let mut bad = t;
        bad.main_image = Some("has space.jpg".into());
        assert!(matches!(
            validate_collection(&[bad]).findings[0],
            Finding::DanglingImage { .. }
        ));
    }
}
