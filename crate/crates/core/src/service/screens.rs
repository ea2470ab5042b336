//! Screen model: landing, task list, then one screen per step.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::resolve::{CompiledTask, SegmentSpan};
use crate::task::{Domain, IngredientLine, TaskSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskCard {
    pub task_id: String,
    pub title: String,
    pub domain: Domain,
    pub main_image: Option<String>,
    /// Every step compiled to a playlist.
    pub asl_supported: bool,
}

impl TaskCard {
    pub fn of(compiled: &CompiledTask) -> Self {
        Self {
            task_id: compiled.task.task_id.clone(),
            title: compiled.task.title.clone(),
            domain: compiled.task.domain,
            main_image: compiled.task.main_image.clone(),
            asl_supported: compiled.fully_signed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Navigation {
    pub previous: Option<usize>,
    pub next: Option<usize>,
    pub home: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngredientsPanel {
    /// True when the step lists its own ingredients, false for the full list.
    pub step_specific: bool,
    pub items: Vec<IngredientLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepScreen {
    pub task_id: String,
    pub step_index: usize,
    pub step_count: usize,
    pub text: String,
    pub step_image: Option<String>,
    /// API path of the step playlist; `None` if the step failed to compile.
    pub playlist_ref: Option<String>,
    pub captions: Vec<SegmentSpan>,
    pub navigation: Navigation,
    pub ingredients: Option<IngredientsPanel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Screen {
    Landing {
        featured: Vec<TaskCard>,
        asl_mode_label: String,
    },
    TaskList {
        tasks: Vec<TaskCard>,
    },
    StepScreen(StepScreen),
}

pub fn playlist_path(task_id: &str, step: usize) -> String {
    format!("/tasks/{task_id}/steps/{step}/playlist")
}

fn ingredients_for(task: &TaskSpec, step: usize) -> Option<IngredientsPanel> {
    if task.domain != Domain::Recipe {
        return None;
    }
    match &task.steps[step].relevant_ingredients {
        None => Some(IngredientsPanel {
            step_specific: false,
            items: task.ingredients.clone(),
        }),
        Some(names) => Some(IngredientsPanel {
            step_specific: true,
            items: names
                .iter()
                .map(|n| {
                    task.ingredients
                        .iter()
                        .find(|i| i.name.eq_ignore_ascii_case(n))
                        .cloned()
                        .unwrap_or_else(|| IngredientLine {
                            name: n.clone(),
                            quantity_text: String::new(),
                        })
                })
                .collect(),
        }),
    }
}

pub fn step_screen(compiled: &CompiledTask, i: usize) -> StepScreen {
    let task = &compiled.task;
    let n = compiled.steps.len();
    let step = &compiled.steps[i];
    StepScreen {
        task_id: task.task_id.clone(),
        step_index: step.step_index,
        step_count: n,
        text: step.text.clone(),
        step_image: step.image.clone(),
        playlist_ref: step.playlist.as_ref().map(|_| playlist_path(&task.task_id, step.step_index)),
        captions: step.playlist.as_ref().map(|p| p.boundaries.clone()).unwrap_or_default(),
        navigation: Navigation {
            previous: i.checked_sub(1),
            next: (i + 1 < n).then_some(i + 1),
            home: true,
        },
        ingredients: ingredients_for(task, i),
    }
}

/// Landing, task list, then every step. `catalog` fills the landing and list
/// screens; an empty catalog shows just this task.
pub fn screens_for_task(compiled: &CompiledTask, catalog: &[TaskCard]) -> Vec<Screen> {
    let cards = if catalog.is_empty() {
        vec![TaskCard::of(compiled)]
    } else {
        catalog.to_vec()
    };
    let mut out = vec![
        Screen::Landing {
            featured: cards.iter().filter(|c| c.asl_supported).take(3).cloned().collect(),
            asl_mode_label: "ASL Task".into(),
        },
        Screen::TaskList { tasks: cards },
    ];
    out.extend((0..compiled.steps.len()).map(|i| Screen::StepScreen(step_screen(compiled, i))));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionState {
    pub session_id: Uuid,
    pub task_id: String,
    pub current_step: usize,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Next,
    Previous,
    Home,
}

impl SessionState {
    pub fn new(task_id: &str) -> Self {
        Self {
            session_id: Uuid::new_v4(),
            task_id: task_id.to_string(),
            current_step: 0,
            created_at: Utc::now(),
        }
    }

    /// Moves within `[0, step_count)`; `None` (state untouched) when the move
    /// would leave that range.
    pub fn navigate(&mut self, direction: Direction, step_count: usize) -> Option<usize> {
        let target = match direction {
            Direction::Next => self.current_step.checked_add(1).filter(|&s| s < step_count)?,
            Direction::Previous => self.current_step.checked_sub(1)?,
            Direction::Home => 0,
        };
        self.current_step = target;
        Some(target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn navigation_bounds() {
        let mut s = SessionState::new("t");
        assert_eq!(s.navigate(Direction::Previous, 3), None);
        assert_eq!(s.navigate(Direction::Next, 3), Some(1));
        assert_eq!(s.navigate(Direction::Next, 3), Some(2));
        assert_eq!(s.navigate(Direction::Next, 3), None);
        assert_eq!(s.current_step, 2);
        assert_eq!(s.navigate(Direction::Home, 3), Some(0));
    }
}
