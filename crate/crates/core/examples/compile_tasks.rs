//! Compiles the bundled tasks with the rule translator into a directory of
//! per-task JSON files.
//!
//! cargo run --example compile_tasks -- [OUT_DIR]

use std::path::PathBuf;
use std::sync::Arc;

use signpipe::pipeline::{compile_all, load_synonyms, write_compiled};
use signpipe::resolve::{CompoundTable, FallbackOrder, PosCrucialPolicy, ResolveTables, VideoManifest};
use signpipe::rule::{Lexicon, RuleTranslator};
use signpipe::task::load_task_dir;

fn main() -> anyhow::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("signpipe-compiled"));
    let tables = ResolveTables {
        manifest: VideoManifest::load(&root.join("fixtures/manifest.json"))?,
        synonyms: load_synonyms(
            Some(&root.join("data/synonyms.tsv")),
            Some(&root.join("data/gloss_frequency.tsv")),
        )?,
        compounds: CompoundTable::load(&root.join("data/compounds.tsv"))?,
    };
    let tasks = load_task_dir(&root.join("fixtures/tasks"))?;
    let crucial = PosCrucialPolicy::new(Arc::new(Lexicon::bundled().clone()));
    let compiled = compile_all(
        &tasks,
        &RuleTranslator::default(),
        &tables,
        &crucial,
        FallbackOrder::default(),
        None,
    );
    for (c, path) in compiled.iter().zip(write_compiled(&out, &compiled)?) {
        let failed = c.failures().count();
        println!("{:<24} {} steps, {failed} failed  {}", c.task_id(), c.steps.len(), path.display());
    }
    Ok(())
}
