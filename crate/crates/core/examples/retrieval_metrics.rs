//! Hit rate and recall@1 of the shipped gloss corpora against the bundled
//! manifest, under both recall definitions.
//!
//! cargo run --example retrieval_metrics

use std::path::PathBuf;

use signpipe::metrics::{retrieval_report, RecallDefinition};
use signpipe::pipeline::{load_synonyms, read_corpus, sequences};
use signpipe::resolve::VideoManifest;

fn main() -> anyhow::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let manifest = VideoManifest::load(&root.join("fixtures/manifest.json"))?;
    let syn = load_synonyms(
        Some(&root.join("data/synonyms.tsv")),
        Some(&root.join("data/gloss_frequency.tsv")),
    )?;
    println!("{:<6} {:>8} {:>8} {:>10} {:>10}", "corpus", "glosses", "hit", "rec@1 rec", "rec@1 all");
    for name in ["llm", "rule"] {
        let seqs = sequences(&read_corpus(&root.join(format!("fixtures/corpus/{name}.jsonl")))?)?;
        let ex = retrieval_report(&seqs, &manifest, &syn, RecallDefinition::Recoverable)?;
        let ap = retrieval_report(&seqs, &manifest, &syn, RecallDefinition::AllGlosses)?;
        println!(
            "{name:<6} {:>8} {:>8.4} {:>10.4} {:>10.4}",
            ex.n_glosses,
            ex.hit_rate,
            ex.recall_at_1.unwrap_or(f64::NAN),
            ap.recall_at_1.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
