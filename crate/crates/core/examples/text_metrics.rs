//! BLEU, ROUGE-L, chrF and WER of the LLM corpus against the rule corpus.
//!
//! cargo run --example text_metrics

use std::path::PathBuf;

use signpipe::metrics::{compare_translations, BleuSmoothing};
use signpipe::pipeline::read_corpus;

fn main() -> anyhow::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");
    let llm: Vec<String> = read_corpus(&root.join("llm.jsonl"))?.into_iter().map(|r| r.glosses).collect();
    let rule: Vec<String> = read_corpus(&root.join("rule.jsonl"))?.into_iter().map(|r| r.glosses).collect();
    for smoothing in [BleuSmoothing::None, BleuSmoothing::Epsilon(0.1)] {
        let r = compare_translations(&llm, &rule, smoothing)?;
        println!("{smoothing:?}");
        println!("  BLEU-1..4 {:.4} {:.4} {:.4} {:.4}", r.bleu_1, r.bleu_2, r.bleu_3, r.bleu_4);
        println!("  ROUGE-L   {:.4}", r.rouge_l_f1);
        println!("  chrF      {:.2}", r.chrf);
        println!("  WER       {:.4}", r.wer);
    }
    Ok(())
}
