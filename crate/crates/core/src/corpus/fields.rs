//! Field matching shared by gold-plan construction and the mock planner.

use alloc::vec::Vec;

use super::ContextItem;
use crate::retrieval::tokenize;

/// `(key, value)` pairs a planner may copy into API arguments: the title
/// first, then every categorical tag in key order.
pub fn item_fields(item: &ContextItem) -> Vec<(&str, &str)> {
    let mut out = Vec::with_capacity(item.categorical_tags.len() + 1);
    out.push(("title", item.title.as_str()));
    out.extend(
        item.categorical_tags
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str())),
    );
    out
}

/// True when the parameter name and the field key share a token
/// (`due_date` matches `date`, `phone_number` matches `phone_number`).
pub fn param_matches_key(param: &str, key: &str) -> bool {
    let p = tokenize(param);
    tokenize(key).iter().any(|k| p.contains(k))
}

/// First field of `fields` whose key matches `param`.
pub fn find_field<'a>(param: &str, fields: &[(&'a str, &'a str)]) -> Option<&'a str> {
    fields
        .iter()
        .find(|(k, _)| param_matches_key(param, k))
        .map(|&(_, v)| v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_overlap() {
        assert!(param_matches_key("due_date", "date"));
        assert!(param_matches_key("phone_number", "phone_number"));
        assert!(param_matches_key("reminder", "reminder"));
        assert!(!param_matches_key("reminder", "title"));
        assert!(!param_matches_key("contact", "sender"));
    }

    #[test]
    fn first_match_wins() {
        let f = [("title", "A"), ("date", "2023-12-01"), ("due_date", "x")];
        assert_eq!(find_field("due_date", &f), Some("2023-12-01"));
        assert_eq!(find_field("song", &f), None);
    }
}
