//! Lists corpus glosses the manifest cannot serve, then checks that every
//! manifest file exists under a root directory.
//!
//! cargo run --example check_manifest -- [ASSET_ROOT]

use std::collections::BTreeMap;
use std::path::PathBuf;

use signpipe::gloss::validate_sequence;
use signpipe::pipeline::{read_corpus, sequences};
use signpipe::resolve::VideoManifest;

fn main() -> anyhow::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let manifest = VideoManifest::load(&root.join("fixtures/manifest.json"))?;
    let seqs = sequences(&read_corpus(&root.join("fixtures/corpus/llm.jsonl"))?)?;

    let mut uncovered: BTreeMap<String, usize> = BTreeMap::new();
    for s in &seqs {
        for f in validate_sequence(s, &manifest) {
            *uncovered.entry(f.token).or_default() += 1;
        }
    }
    println!("{} gloss types without a clip:", uncovered.len());
    for (token, n) in &uncovered {
        println!("  {token:<16} {n}");
    }

    let assets = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| root.join("fixtures"));
    let report = manifest.verify(&assets);
    println!(
        "{} checked, {} remote, {} missing under {}",
        report.checked,
        report.skipped_remote,
        report.missing.len(),
        assets.display()
    );
    Ok(())
}
