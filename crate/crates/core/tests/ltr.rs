use ctune_core::ltr::{separable_groups, train, TrainConfig};
use ctune_core::RankedList;

#[test]
fn separable_task_improves_by_a_wide_margin() {
    let out = train(&separable_groups(60, 10, 11), &TrainConfig::default()).unwrap();
    let first = out.log.first().unwrap().mean_train_ndcg;
    let last = out.final_ndcg;
    assert_eq!(out.log.len(), 300);
    assert!(last - first >= 0.2, "round 1 {first} vs final {last}");
}

#[test]
fn training_is_deterministic() {
    let groups = separable_groups(30, 8, 5);
    let cfg = TrainConfig {
        n_trees: 40,
        subsample: 0.5,
        seed: 9,
        ..TrainConfig::default()
    };
    let a = train(&groups, &cfg).unwrap();
    let b = train(&groups, &cfg).unwrap();
    assert_eq!(a.model, b.model);
    assert_eq!(a.final_ndcg.to_bits(), b.final_ndcg.to_bits());
}

#[test]
fn predictions_do_not_depend_on_row_order() {
    let groups = separable_groups(30, 8, 6);
    let cfg = TrainConfig {
        n_trees: 30,
        ..TrainConfig::default()
    };
    let model = train(&groups, &cfg).unwrap().model;
    let g = &groups[0];
    let rows: Vec<_> = g.rows.iter().map(|r| r.features.clone()).collect();
    let mut reversed = rows.clone();
    reversed.reverse();
    let mut back = model.predict(&reversed).unwrap();
    back.reverse();
    assert_eq!(model.predict(&rows).unwrap(), back);

    let cands: Vec<_> = g
        .rows
        .iter()
        .map(|r| (r.item_id.as_str(), r.features.clone()))
        .collect();
    let ranked: RankedList = model.rank(&cands, 5).unwrap();
    assert!(ranked.check().is_ok());
    assert_eq!(ranked.len(), 5);
}
