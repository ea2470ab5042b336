//! Walks one gloss sequence down the fallback ladder and stitches a playlist.
//!
//! cargo run --example resolve_playlist -- "T-O-F-U SHOELACE MIX GENTLE STIR"

use std::path::PathBuf;
use std::sync::Arc;

use signpipe::gloss::{GlossSequence, Provenance};
use signpipe::pipeline::load_synonyms;
use signpipe::resolve::{
    stitch, CompoundTable, FallbackOrder, PosCrucialPolicy, ResolveTables, Resolver, VideoManifest,
};
use signpipe::rule::Lexicon;

fn main() -> anyhow::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let raw = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "T-O-F-U SHOELACE MIX GENTLE STIR CORNSTARCH WOK".into());
    let tables = ResolveTables {
        manifest: VideoManifest::load(&root.join("fixtures/manifest.json"))?,
        synonyms: load_synonyms(
            Some(&root.join("data/synonyms.tsv")),
            Some(&root.join("data/gloss_frequency.tsv")),
        )?,
        compounds: CompoundTable::load(&root.join("data/compounds.tsv"))?,
    };
    let crucial = PosCrucialPolicy::new(Arc::new(Lexicon::bundled().clone()));
    let seq = GlossSequence::from_raw(0, &raw, Provenance::Manual)?;

    for order in [FallbackOrder::FingerspellFirst, FallbackOrder::PreferSynonym] {
        println!("{order:?}");
        let mut resolver = Resolver::new(&tables, &crucial, order);
        match resolver.resolve_step(&seq) {
            Ok(step) => {
                for r in &step.glosses {
                    println!("  {:<12} {:<14} {}", r.gloss.token(), r.resolution.label(), r.uris.join(" "));
                }
                println!("  {} segments", stitch(&step).segments.len());
            }
            Err(e) => println!("  {e}"),
        }
    }
    Ok(())
}
