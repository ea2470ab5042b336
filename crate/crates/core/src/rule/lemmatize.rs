use super::lexicon::Lexicon;
use super::pos::Pos;

const VOWELS: &[u8] = b"aeiou";

fn is_vowel(b: u8) -> bool {
    VOWELS.contains(&b)
}

fn undouble(stem: &str) -> Option<&str> {
    let b = stem.as_bytes();
    let n = b.len();
    (n >= 3 && b[n - 1] == b[n - 2] && !is_vowel(b[n - 1]) && !b"lsfz".contains(&b[n - 1]))
        .then(|| &stem[..n - 1])
}

// bak(ed) -> bake, incorporat(ed) -> incorporate, but heat(ed), open(ed) stay.
fn needs_silent_e(stem: &str) -> bool {
    let b = stem.as_bytes();
    let n = b.len();
    if n < 2 {
        return false;
    }
    let last = b[n - 1];
    let mid = b[n - 2];
    if !b"cgkstvz".contains(&last) || !is_vowel(mid) {
        return false;
    }
    n == 2 || !is_vowel(b[n - 3])
}

/// Candidate base forms produced by the suffix table for `word` under `pos`,
/// in table order.
pub(crate) fn rule_candidates(lexicon: &Lexicon, word: &str, pos: Pos) -> Vec<String> {
    lexicon
        .lemma_rules()
        .iter()
        .filter(|r| r.pos == pos)
        .flat_map(|r| rule_candidates_single(word, &r.suffix, &r.replacement))
        .collect()
}

/// Finds a known lemma reachable through the suffix table, trying rules in
/// table order. Used by the tagger for inflected words.
pub(crate) fn analyze(lexicon: &Lexicon, word: &str) -> Option<(Pos, String)> {
    for rule in lexicon.lemma_rules() {
        for cand in rule_candidates_single(word, &rule.suffix, &rule.replacement) {
            if lexicon.is_lemma(&cand, rule.pos) {
                return Some((rule.pos, cand));
            }
        }
    }
    None
}

fn rule_candidates_single(word: &str, suffix: &str, replacement: &str) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(stem) = word.strip_suffix(suffix) {
        if stem.len() >= 2 {
            out.push(format!("{stem}{replacement}"));
            if replacement.is_empty() {
                if let Some(short) = undouble(stem) {
                    out.push(short.to_string());
                }
            }
        }
    }
    out
}

fn verb_stem(stem: &str) -> String {
    if let Some(short) = undouble(stem) {
        short.to_string()
    } else if needs_silent_e(stem) {
        format!("{stem}e")
    } else {
        stem.to_string()
    }
}

fn guess(word: &str, pos: Pos) -> String {
    match pos {
        Pos::Noun => {
            if let Some(stem) = word.strip_suffix("ies").filter(|s| s.len() >= 2) {
                format!("{stem}y")
            } else if ["ches", "shes", "sses", "xes", "zes", "oes"]
                .iter()
                .any(|s| word.ends_with(s) && word.len() > s.len() + 1)
            {
                word[..word.len() - 2].to_string()
            } else if word.ends_with('s')
                && !["ss", "us", "is"].iter().any(|s| word.ends_with(s))
                && word.len() > 3
            {
                word[..word.len() - 1].to_string()
            } else {
                word.to_string()
            }
        }
        Pos::Verb => {
            if let Some(stem) = word.strip_suffix("ies").or_else(|| word.strip_suffix("ied")) {
                if stem.len() >= 2 {
                    return format!("{stem}y");
                }
            }
            for suffix in ["ing", "ed"] {
                if let Some(stem) = word.strip_suffix(suffix).filter(|s| s.len() >= 2) {
                    return verb_stem(stem);
                }
            }
            if ["ches", "shes", "sses", "xes", "zes"].iter().any(|s| word.ends_with(s)) {
                return word[..word.len() - 2].to_string();
            }
            if word.ends_with('s') && !word.ends_with("ss") && word.len() > 3 {
                return word[..word.len() - 1].to_string();
            }
            word.to_string()
        }
        _ => word.to_string(),
    }
}

/// Base form of `token` for tag `pos`: lexicon entry first, then a suffix
/// rule landing on a known lemma, then a spelling heuristic for unknown words.
/// Always lowercase.
pub fn lemmatize(lexicon: &Lexicon, token: &str, pos: Pos) -> String {
    let word = token.to_lowercase();
    if let Some(lemma) = lexicon.lemma_for(&word, pos) {
        return lemma.to_string();
    }
    if !matches!(pos, Pos::Noun | Pos::Verb | Pos::Adjective) {
        return lexicon.first_lemma(&word).unwrap_or(&word).to_string();
    }
    if lexicon.is_lemma(&word, pos) {
        return word;
    }
    if let Some(known) = rule_candidates(lexicon, &word, pos)
        .into_iter()
        .find(|c| lexicon.is_lemma(c, pos))
    {
        return known;
    }
    if let Some(lemma) = lexicon.first_lemma(&word) {
        return lemma.to_string();
    }
    guess(&word, pos)
}
