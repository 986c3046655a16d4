//! Learning to rank: features for (query, item) pairs and a LambdaMART
//! trainer built on best-first regression trees.

mod features;
mod lambda;
mod model;
mod synthetic;
mod tree;

pub use features::{
    default_schema, extract_features, hours_match, item_features, schema_hash, FeatureVector,
    GroupRow, QueryGroup, QuerySignals, FEATURE_SCHEMA, HOUR_MATCH_WINDOW, N_FEATURES,
    SCHEMA_VERSION,
};
pub use lambda::{delta_ndcg, ideal_dcg, lambda_gradients, lambdas_at, positions};
pub use model::{
    swap_delta, train, train_with_schema, LtrModel, RoundStat, TrainConfig, TrainError,
    TrainOutcome,
};
pub use synthetic::separable_groups;
pub use tree::{fit_tree, Columns, Node, Presorted, RegressionTree, LEAF_CLIP};
