use serde_json::json;

use crate::task::TaskSpec;

/// Bumped whenever the template text changes, so old cache entries stop
/// matching instead of being served for a different prompt.
pub const PROMPT_VERSION: &str = "1";

const INSTRUCTION: &str = "Please translate each step to American Sign Language gloss.";

/// The chat prompt for a whole task. Only step texts are sent; ingredient
/// lines stay in English on screen and are never glossed.
pub fn build_prompt(task: &TaskSpec) -> String {
    let steps: Vec<&str> = task.step_texts().collect();
    let payload = json!({ "steps": steps });
    format!(
        "[prompt v{PROMPT_VERSION}]\n\
         {INSTRUCTION}\n\
         The steps are given as a JSON object below.\n\
         Write glosses in capital letters separated by single spaces, with no punctuation.\n\
         Fingerspell names and words without a sign using hyphens between letters, like F-I-N-G-E-R.\n\
         Answer with a JSON array of exactly {n} strings, one gloss string per step, in step order, and nothing else.\n\n\
         {payload}",
        n = steps.len(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::load_tasks;

    #[test]
    fn contents() {
        let task = load_tasks(
            br#"{"title":"Cake","ingredients":[{"name":"cocoa powder","quantity_text":"2 tbsp"}],
                "task_texts":["Mix well.","Bake it.","Let cool."]}"#,
            "1",
        )
        .unwrap()
        .remove(0);
        let p = build_prompt(&task);
        assert!(p.contains("translate each step to American Sign Language gloss"));
        assert!(p.contains(r#"{"steps":["Mix well.","Bake it.","Let cool."]}"#), "{p}");
        assert!(p.contains("exactly 3 strings"));
        assert!(!p.contains("cocoa"));
        assert!(!p.contains("2 tbsp"));
        assert_eq!(p, build_prompt(&task));
    }

    #[test]
    fn single_step() {
        let task = load_tasks(br#"{"title":"T","steps":[{"index":0,"text":"Fold."}]}"#, "1")
            .unwrap()
            .remove(0);
        assert!(build_prompt(&task).ends_with(r#"{"steps":["Fold."]}"#));
    }
}
