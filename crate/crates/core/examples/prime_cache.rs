//! Fills a translation cache from recorded endpoint responses, one
//! `<task_id>.json` per task, without touching the network.
//!
//! cargo run --example prime_cache -- [TASKS] [RESPONSES] [CACHE]

use std::path::PathBuf;
use std::sync::Arc;

use signpipe::llm::{LlmRequestConfig, LlmTranslator, ReplayClient, TranslationCache};
use signpipe::task::load_task_dir;

fn main() -> anyhow::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut args = std::env::args().skip(1).map(PathBuf::from);
    let tasks = args.next().unwrap_or_else(|| fixtures.join("tasks"));
    let responses = args.next().unwrap_or_else(|| fixtures.join("llm_responses"));
    let cache_dir = args.next().unwrap_or_else(|| fixtures.join("llm_cache"));

    let tasks = load_task_dir(&tasks)?;
    let client = Arc::new(ReplayClient::from_dir(&tasks, &responses)?);
    let cache = Arc::new(TranslationCache::open(&cache_dir)?);
    let before = cache.len();
    let translator = LlmTranslator::new(LlmRequestConfig::default(), cache.clone(), Some(client.clone()))?;
    for t in &tasks {
        match translator.fetch(t) {
            Ok(steps) => println!("{:<24} {} steps", t.task_id, steps.len()),
            Err(e) => println!("{:<24} {e}", t.task_id),
        }
    }
    println!(
        "{} new entries in {} ({} replayed calls)",
        cache.len() - before,
        cache_dir.display(),
        client.calls()
    );
    Ok(())
}
