use std::collections::BTreeSet;

use ctune_core::corpus::Plan;
use ctune_core::metrics::RetrievalJudgment;
use ctune_core::{ast_match, ndcg_at_k, recall_at_k, RankedList};
use proptest::prelude::*;

fn case() -> impl Strategy<Value = (Vec<usize>, BTreeSet<usize>)> {
    (
        Just((0..10).collect::<Vec<usize>>()).prop_shuffle(),
        prop::collection::btree_set(0usize..12, 1..5),
    )
}

fn ranked(order: &[usize]) -> RankedList {
    RankedList::from_order(order.iter().map(|i| format!("d{i}"))).unwrap()
}

fn judgment(gold: &BTreeSet<usize>) -> RetrievalJudgment {
    RetrievalJudgment::binary("q", gold.iter().map(|i| format!("d{i}")))
}

proptest! {
    #[test]
    fn recall_grows_with_k_and_both_stay_in_unit_range((order, gold) in case()) {
        let (r, j) = (ranked(&order), judgment(&gold));
        let mut last = 0.0;
        for k in 1..=12 {
            let rec = recall_at_k(&r, &j.gold_ids, k).unwrap();
            let nd = ndcg_at_k(&r, &j, k).unwrap();
            prop_assert!(rec >= last);
            prop_assert!((0.0..=1.0).contains(&rec) && (0.0..=1.0 + 1e-12).contains(&nd));
            last = rec;
        }
    }

    #[test]
    fn gold_first_in_any_order_is_perfect(
        gold in prop::collection::btree_set(0usize..10, 1..5),
        seed in any::<u64>(),
    ) {
        let mut head: Vec<usize> = gold.iter().copied().collect();
        let shift = (seed % head.len() as u64) as usize;
        head.rotate_left(shift);
        let tail = (10..14).filter(|i| !gold.contains(i));
        let order: Vec<usize> = head.into_iter().chain(tail).collect();
        let (r, j) = (ranked(&order), judgment(&gold));
        for k in gold.len()..=order.len() {
            prop_assert!((ndcg_at_k(&r, &j, k).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_implies_correct_and_hallucination_implies_wrong(
        api in "[a-c]",
        gold_api in "[a-c]",
        v in "[xy]",
    ) {
        let toolbox: BTreeSet<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let pred = Plan::new(api).arg("p", v);
        let gold = Plan::new(gold_api).arg("p", "x");
        let o = ast_match(&pred, &gold, &toolbox);
        prop_assert!(!o.exact || o.ast_correct);
        prop_assert!(!o.hallucinated || !o.ast_correct);
    }
}

#[test]
fn no_relevant_items_scores_zero() {
    let j = RetrievalJudgment::graded("q", [("d1", 0u32)]);
    assert_eq!(ndcg_at_k(&ranked(&[1, 2]), &j, 2).unwrap(), 0.0);
}
