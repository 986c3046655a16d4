use alloc::string::String;
use alloc::vec::Vec;

/// Lowercases `text` and splits it on every non-alphanumeric character.
///
/// Alphanumeric is the Unicode notion, so accented words and non-Latin
/// scripts survive intact.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            out.push(core::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_examples() {
        assert_eq!(tokenize("Guitar Class!"), ["guitar", "class"]);
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize("LLM Discussion 2023"),
            ["llm", "discussion", "2023"]
        );
    }

    #[test]
    fn unicode_and_separators() {
        assert_eq!(tokenize("Café-Crème__x"), ["café", "crème", "x"]);
        assert_eq!(tokenize("get_reminder"), ["get", "reminder"]);
        assert!(tokenize(" ,.;!! ").is_empty());
    }
}
