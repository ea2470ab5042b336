//! Screen model and the HTTP API that serves compiled tasks.

mod screens;
mod server;

use thiserror::Error;

pub use screens::{
    playlist_path, screens_for_task, step_screen, Direction, IngredientsPanel, Navigation, Screen, SessionState,
    StepScreen, TaskCard,
};
pub use server::{router, serve, AppState};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("task {0} is compiled twice")]
    DuplicateTask(String),
    #[error("loading compiled tasks: {0}")]
    Load(String),
}
