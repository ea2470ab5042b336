//! Compiles the bundled tasks in memory and serves the HTTP API.
//!
//! cargo run --example serve -- [PORT]
//! curl localhost:8080/tasks/origami-cup/screens

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use signpipe::pipeline::{compile_all, load_synonyms};
use signpipe::resolve::{CompoundTable, FallbackOrder, PosCrucialPolicy, ResolveTables, VideoManifest};
use signpipe::rule::{Lexicon, RuleTranslator};
use signpipe::service::{router, serve, AppState};
use signpipe::task::load_task_dir;

fn main() -> anyhow::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let port: u16 = std::env::args().nth(1).map(|p| p.parse()).transpose()?.unwrap_or(8080);
    let tables = ResolveTables {
        manifest: VideoManifest::load(&root.join("fixtures/manifest.json"))?,
        synonyms: load_synonyms(
            Some(&root.join("data/synonyms.tsv")),
            Some(&root.join("data/gloss_frequency.tsv")),
        )?,
        compounds: CompoundTable::load(&root.join("data/compounds.tsv"))?,
    };
    let crucial = PosCrucialPolicy::new(Arc::new(Lexicon::bundled().clone()));
    let compiled = compile_all(
        &load_task_dir(&root.join("fixtures/tasks"))?,
        &RuleTranslator::default(),
        &tables,
        &crucial,
        FallbackOrder::default(),
        None,
    );
    let app = router(AppState::new(compiled, None)?, None);
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    println!("listening on http://{addr}");
    tokio::runtime::Runtime::new()?.block_on(serve(app, addr))?;
    Ok(())
}
