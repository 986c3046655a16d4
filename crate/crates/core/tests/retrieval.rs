use ctune_core::retrieval::{
    bm25_score, bm25_topk, cosine_topk, tokenize, Bm25Params, Embedding, InvertedIndex,
};
use proptest::prelude::*;

const WORDS: [&str; 8] = [
    "guitar", "class", "milk", "tuner", "review", "monday", "buy", "lesson",
];

fn docs() -> impl Strategy<Value = Vec<Vec<usize>>> {
    prop::collection::vec(prop::collection::vec(0..WORDS.len(), 1..12), 1..8)
}

fn text(words: &[usize]) -> String {
    words
        .iter()
        .map(|&w| WORDS[w])
        .collect::<Vec<_>>()
        .join(" ")
}

fn index_of(docs: &[Vec<usize>]) -> InvertedIndex {
    InvertedIndex::build(
        docs.iter()
            .enumerate()
            .map(|(i, d)| (format!("d{i}"), text(d))),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn bm25_lists_are_valid(docs in docs(), query in prop::collection::vec(0..WORDS.len(), 1..4), k in 1usize..10) {
        let index = index_of(&docs);
        let terms = tokenize(&text(&query));
        let ranked = bm25_topk(&index, &terms, &Bm25Params::default(), k);
        prop_assert!(ranked.check().is_ok());
        prop_assert!(ranked.len() <= k.min(docs.len()));
        prop_assert!(ranked.entries().iter().all(|e| e.score > 0.0));
    }

    #[test]
    fn one_more_occurrence_never_lowers_the_score(
        docs in docs(),
        term in 0..WORDS.len(),
        target in 0usize..8,
    ) {
        let target = target % docs.len();
        let before = index_of(&docs);
        let mut grown = docs.clone();
        grown[target].push(term);
        let after = index_of(&grown);
        let q = [WORDS[term]];
        let p = Bm25Params::default();
        let id = format!("d{target}");
        let was = bm25_score(&before, &id, &q, &p);
        let now = bm25_score(&after, &id, &q, &p);
        if docs[target].contains(&term) {
            prop_assert!(now >= was - 1e-12, "{was} -> {now}");
        } else {
            prop_assert!(now > 0.0);
        }
    }

    #[test]
    fn cosine_topk_matches_pairwise_comparison(
        vecs in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 1..10),
        q in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let Some(query) = Embedding::normalized(q) else { return Ok(()) };
        let cands: Vec<(String, Embedding)> = vecs
            .into_iter()
            .enumerate()
            .filter_map(|(i, v)| Some((format!("c{i}"), Embedding::normalized(v)?)))
            .collect();
        let ranked = cosine_topk(&query, cands.iter().map(|(id, e)| (id.as_str(), e)), cands.len()).unwrap();
        prop_assert!(ranked.check().is_ok());
        prop_assert_eq!(ranked.len(), cands.len());
        let ids: Vec<&str> = ranked.ids().collect();
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                let da = query.dot(&cands.iter().find(|(id, _)| id == ids[a]).unwrap().1);
                let db = query.dot(&cands.iter().find(|(id, _)| id == ids[b]).unwrap().1);
                prop_assert!(da > db || (da == db && ids[a] < ids[b]));
            }
        }
    }
}

#[test]
fn normalizing_three_four_five() {
    let e = Embedding::normalized(vec![3.0, 4.0, 0.0, 0.0]).unwrap();
    assert!((e.values()[0] - 0.6).abs() < 1e-12 && (e.values()[1] - 0.8).abs() < 1e-12);
}
