//! Invariant checks over a whole corpus.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use chrono::{DateTime, Utc};

use super::Corpus;

/// One broken invariant, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub entity: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.message)
    }
}

fn push(out: &mut Vec<Violation>, entity: impl Into<String>, message: String) {
    out.push(Violation {
        entity: entity.into(),
        message,
    });
}

/// Checks every data-model invariant. The epoch window is not stored in the
/// corpus; use [`validate_corpus_window`] to check item timestamps as well.
pub fn validate_corpus(corpus: &Corpus) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut persona_ids = BTreeSet::new();
    for p in &corpus.personas {
        if !persona_ids.insert(p.id.as_str()) {
            push(&mut out, &p.id, "duplicate persona id".into());
        }
        let sum: f64 = p.app_usage_profile.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            push(
                &mut out,
                &p.id,
                format!("app usage weights sum to {sum}, expected 1"),
            );
        }
        if let Some((app, w)) = p
            .app_usage_profile
            .iter()
            .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
        {
            push(&mut out, &p.id, format!("usage weight for {app} is {w}"));
        }
    }

    let mut items_by_persona: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for s in &corpus.stores {
        let entity = format!("{}/{}", s.persona_id, s.app);
        if !persona_ids.contains(s.persona_id.as_str()) {
            push(&mut out, &entity, "store references unknown persona".into());
        }
        let ids = items_by_persona.entry(s.persona_id.as_str()).or_default();
        for item in &s.items {
            if item.app != s.app {
                push(
                    &mut out,
                    &item.id,
                    format!("item app {} inside {} store", item.app, s.app),
                );
            }
            if !ids.insert(item.id.as_str()) {
                push(
                    &mut out,
                    &item.id,
                    format!("duplicate item id in persona {}", s.persona_id),
                );
            }
        }
    }

    let mut tool_keys = BTreeSet::new();
    let mut tool_names = BTreeSet::new();
    for t in &corpus.toolbox {
        if !tool_keys.insert((t.app, t.name.as_str())) {
            push(&mut out, &t.name, format!("duplicate tool in {}", t.app));
        }
        tool_names.insert(t.name.as_str());
        if let Some(pos) = t.params.iter().position(|p| !p.required) {
            if t.params[pos..].iter().any(|p| p.required) {
                push(
                    &mut out,
                    &t.name,
                    "required parameter after optional one".into(),
                );
            }
        }
    }

    let mut query_ids = BTreeSet::new();
    for q in &corpus.queries {
        if !query_ids.insert(q.id.as_str()) {
            push(&mut out, &q.id, "duplicate query id".into());
        }
        if !persona_ids.contains(q.persona_id.as_str()) {
            push(&mut out, &q.id, format!("unknown persona {}", q.persona_id));
        }
        if q.gold_context_ids.is_empty() {
            push(&mut out, &q.id, "gold_context_ids is empty".into());
        }
        let known = items_by_persona.get(q.persona_id.as_str());
        for g in &q.gold_context_ids {
            if !known.is_some_and(|ids| ids.contains(g.as_str())) {
                push(
                    &mut out,
                    &q.id,
                    format!("gold context id {g} not found in persona"),
                );
            }
        }
        if q.gold_tools.is_empty() || q.gold_tools.len() > 3 {
            push(
                &mut out,
                &q.id,
                format!("{} gold tools, expected 1 to 3", q.gold_tools.len()),
            );
        }
        for t in &q.gold_tools {
            if !tool_names.contains(t.as_str()) {
                push(&mut out, &q.id, format!("gold tool {t} not in toolbox"));
            }
        }
        if !q.gold_tools.contains(&q.gold_plan.api) {
            push(
                &mut out,
                &q.id,
                format!("gold plan api {} not in gold tools", q.gold_plan.api),
            );
        }
    }
    out
}

/// [`validate_corpus`] plus the check that every item timestamp lies in
/// `[start, end]`.
pub fn validate_corpus_window(
    corpus: &Corpus,
    start: DateTime<Utc>,
    end: DateTime<Utc>,
) -> Vec<Violation> {
    let mut out = validate_corpus(corpus);
    for s in &corpus.stores {
        for item in &s.items {
            if item.timestamp < start || item.timestamp > end {
                push(
                    &mut out,
                    &item.id,
                    format!(
                        "timestamp {} outside epoch window",
                        item.timestamp.to_rfc3339()
                    ),
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_corpus, App, CorpusConfig};

    fn corpus() -> (Corpus, CorpusConfig) {
        let cfg = CorpusConfig {
            n_personas: 25,
            ..CorpusConfig::default()
        };
        (generate_corpus(&cfg).unwrap(), cfg)
    }

    #[test]
    fn generated_is_clean() {
        let (c, cfg) = corpus();
        assert_eq!(validate_corpus(&c), Vec::new());
        assert_eq!(
            validate_corpus_window(&c, cfg.window_start(), cfg.epoch_start),
            Vec::new()
        );
    }

    #[test]
    fn plan_api_outside_gold_tools() {
        let (mut c, _) = corpus();
        c.queries[0].gold_plan.api = "pause_music".into();
        if c.queries[0].gold_tools.contains(&"pause_music".into()) {
            c.queries[0].gold_plan.api = "clear_search_history".into();
        }
        let v = validate_corpus(&c);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].entity, c.queries[0].id);
    }

    #[test]
    fn mail_item_in_calendar_store() {
        let (mut c, _) = corpus();
        let s = c
            .stores
            .iter_mut()
            .find(|s| s.app == App::Calendar)
            .unwrap();
        s.items[0].app = App::Mail;
        let v = validate_corpus(&c);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].message.contains("calendar store"));
    }

    #[test]
    fn dangling_gold_id() {
        let (mut c, _) = corpus();
        c.queries[3].gold_context_ids.push("nope".into());
        assert_eq!(validate_corpus(&c).len(), 1);
    }

    #[test]
    fn window_check() {
        let (c, cfg) = corpus();
        let v = validate_corpus_window(&c, cfg.epoch_start, cfg.epoch_start);
        assert!(!v.is_empty());
    }
}
