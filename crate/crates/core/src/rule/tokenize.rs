//! Whitespace tokenization with punctuation split off word edges.

fn is_split_punct(c: char) -> bool {
    (c.is_ascii_punctuation() && c != '-' && c != '\'')
        || matches!(c, '\u{201C}' | '\u{201D}' | '\u{2026}' | '\u{2013}' | '\u{2014}')
}

fn is_edge_punct(c: char) -> bool {
    is_split_punct(c) || c == '-' || c == '\'' || c == '\u{2018}' || c == '\u{2019}'
}

/// Splits on whitespace and peels punctuation off both ends of every chunk,
/// one token per punctuation mark. Inner hyphens, apostrophes, and numeric
/// separators (`2.5`, `1/2`) stay inside the word.
pub fn tokenize(sentence: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in sentence.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut start = 0;
        let mut end = chars.len();
        while start < end && is_edge_punct(chars[start]) {
            start += 1;
        }
        while end > start && is_edge_punct(chars[end - 1]) {
            end -= 1;
        }
        for &c in &chars[..start] {
            out.push(c.to_string());
        }
        if start < end {
            let word = &chars[start..end];
            // split interior clause punctuation that is not a numeric separator
            let mut current = String::new();
            for (i, &c) in word.iter().enumerate() {
                let numeric_sep = matches!(c, '.' | ',' | '/' | ':')
                    && i > 0
                    && i + 1 < word.len()
                    && word[i - 1].is_ascii_digit()
                    && word[i + 1].is_ascii_digit();
                if is_split_punct(c) && !numeric_sep {
                    if !current.is_empty() {
                        out.push(std::mem::take(&mut current));
                    }
                    out.push(c.to_string());
                } else {
                    current.push(c);
                }
            }
            if !current.is_empty() {
                out.push(current);
            }
        }
        for &c in &chars[end..] {
            out.push(c.to_string());
        }
    }
    out
}

/// Splits text after `.`, `!` or `?` when followed by whitespace or the end.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = text.as_bytes();
    for (i, c) in text.char_indices() {
        if matches!(c, '.' | '!' | '?') {
            let next = i + c.len_utf8();
            if next >= bytes.len() || bytes[next].is_ascii_whitespace() {
                let s = text[start..next].trim();
                if !s.is_empty() {
                    out.push(s);
                }
                start = next;
            }
        }
    }
    let rest = text[start..].trim();
    if !rest.is_empty() {
        out.push(rest);
    }
    out
}

pub fn is_punctuation_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(is_edge_punct)
}
