//! Coverage curves over growing manifest subsets, written as CSV and SVG.
//!
//! cargo run --example coverage_curve -- [OUT_DIR]

use std::path::PathBuf;

use signpipe::metrics::{coverage_curve, curves_to_csv, render_svg, CurveOptions, RecallDefinition, SubsetPolicy};
use signpipe::pipeline::{load_synonyms, read_corpus, sequences};
use signpipe::resolve::VideoManifest;

fn main() -> anyhow::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let manifest = VideoManifest::load(&root.join("fixtures/manifest.json"))?;
    let syn = load_synonyms(
        Some(&root.join("data/synonyms.tsv")),
        Some(&root.join("data/gloss_frequency.tsv")),
    )?;
    let mut curves = Vec::new();
    for policy in [SubsetPolicy::FrequencyDescending, SubsetPolicy::RandomSeeded] {
        let opts = CurveOptions {
            policy,
            seeds: (0..5).collect(),
            step: 20,
            recall_definition: RecallDefinition::Recoverable,
        };
        for name in ["llm", "rule"] {
            let seqs = sequences(&read_corpus(&root.join(format!("fixtures/corpus/{name}.jsonl")))?)?;
            let c = coverage_curve(&format!("{name}-{policy:?}"), &seqs, &manifest, &syn, &opts)?;
            let last = c.mean.last().expect("curve has points");
            println!("{:<28} final hit_rate {:.4}", c.strategy, last.hit_rate);
            curves.push(c);
        }
    }
    std::fs::write(out.join("coverage.csv"), curves_to_csv(&curves))?;
    std::fs::write(out.join("coverage.svg"), render_svg(&curves)?)?;
    println!("wrote coverage.csv and coverage.svg to {}", out.display());
    Ok(())
}
