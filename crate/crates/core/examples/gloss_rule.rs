//! Rule-based glossing of free text.
//!
//! cargo run --example gloss_rule -- "Whisk the eggs. Fold in the flour."

use signpipe::gloss::render;
use signpipe::rule::{tokenize, pos_tag, Lexicon, RuleTranslator};

fn main() -> anyhow::Result<()> {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "Chop chocolate and add to batter. Stir until incorporated.".into());

    // tags first, so the filtering is visible
    let tagged = pos_tag(&tokenize(&text), Lexicon::bundled());
    for t in &tagged {
        print!("{}/{} ", t.surface, t.pos.code());
    }
    println!();

    let t = RuleTranslator::default();
    println!("{}", render(&t.translate_text(&text)?));
    println!("{}", render(&t.faithful_case_order(true).translate_text(&text)?));
    Ok(())
}
