//! English task instructions to ASL gloss sequences, sign-video playlists,
//! screens and evaluation metrics.

pub mod gloss;
pub mod llm;
pub mod metrics;
pub mod pipeline;
pub mod resolve;
pub mod rule;
pub mod service;
pub mod task;
pub mod translate;
