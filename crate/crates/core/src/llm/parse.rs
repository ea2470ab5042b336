use serde_json::Value;
use thiserror::Error;

/// Where and why a response was rejected. `position` is a JSON path, or
/// `line:column` for syntax errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at {position}: {message}")]
pub struct ParseError {
    pub position: String,
    pub message: String,
}

fn err(position: impl Into<String>, message: impl Into<String>) -> ParseError {
    ParseError {
        position: position.into(),
        message: message.into(),
    }
}

fn strings(items: &[Value], base: &str, expected: usize) -> Result<Vec<String>, ParseError> {
    let out = items
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            Value::String(s) => Ok(s.clone()),
            other => Err(err(format!("{base}[{i}]"), format!("expected a string, found {other}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if out.len() != expected {
        return Err(err(
            base,
            format!("expected {expected} step glosses, found {}", out.len()),
        ));
    }
    Ok(out)
}

/// Accepts `["..", ..]` or `{"any_key": ["..", ..]}` with exactly
/// `expected_steps` strings.
pub fn parse_llm_response(raw: &str, expected_steps: usize) -> Result<Vec<String>, ParseError> {
    let value: Value = serde_json::from_str(raw.trim())
        .map_err(|e| err(format!("{}:{}", e.line(), e.column()), format!("not JSON: {e}")))?;
    match &value {
        Value::Array(items) => strings(items, "$", expected_steps),
        Value::Object(map) => {
            let mut arrays = map.iter().filter(|(_, v)| v.is_array());
            match (arrays.next(), arrays.next(), map.len()) {
                (Some((k, Value::Array(items))), None, 1) => strings(items, &format!("$.{k}"), expected_steps),
                _ => Err(err("$", "expected an object with a single array field")),
            }
        }
        other => Err(err("$", format!("expected an array, found {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepted_shapes() {
        assert_eq!(parse_llm_response(r#"["CHOP APPLE","STIR"]"#, 2).unwrap(), ["CHOP APPLE", "STIR"]);
        assert_eq!(parse_llm_response(r#" {"steps":["A B"]} "#, 1).unwrap(), ["A B"]);
    }

    #[test]
    fn rejections() {
        let e = parse_llm_response(r#"["A"]"#, 2).unwrap_err();
        assert_eq!(e.position, "$");
        assert!(e.message.contains("expected 2"));
        let e = parse_llm_response(r#"["A", 3]"#, 2).unwrap_err();
        assert_eq!(e.position, "$[1]");
        let e = parse_llm_response("Sure! Here are the glosses: CHOP APPLE", 1).unwrap_err();
        assert_eq!(e.position, "1:1");
        assert!(parse_llm_response(r#"{"a":["X"],"b":["Y"]}"#, 1).is_err());
        assert!(parse_llm_response(r#"{"a":["X"],"note":"hi"}"#, 1).is_err());
        assert!(parse_llm_response(r#""X""#, 1).is_err());
        assert_eq!(parse_llm_response(r#"{"g":["X", 1]}"#, 2).unwrap_err().position, "$.g[1]");
    }
}
