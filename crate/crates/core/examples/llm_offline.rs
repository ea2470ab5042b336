//! Reads LLM glosses for the bundled tasks out of the shipped cache, with no
//! client configured.
//!
//! cargo run --example llm_offline

use std::path::PathBuf;
use std::sync::Arc;

use signpipe::llm::{LlmRequestConfig, LlmTranslator, TranslationCache};
use signpipe::task::load_task_dir;
use signpipe::translate::GlossTranslator;

fn main() -> anyhow::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let cache = Arc::new(TranslationCache::open(fixtures.join("llm_cache"))?);
    let t = LlmTranslator::new(LlmRequestConfig::default(), cache, None)?.offline(true);
    for task in load_task_dir(&fixtures.join("tasks"))? {
        println!("# {}", task.title);
        for (step, out) in task.steps.iter().zip(t.translate_task(&task)?) {
            match out {
                Ok(seq) => println!("  {:<60.60} {}", step.text, seq.render()),
                Err(e) => println!("  {:<60.60} error: {e}", step.text),
            }
        }
    }
    Ok(())
}
