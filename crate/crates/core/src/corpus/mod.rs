//! Personas, context stores, the toolbox and labeled queries.

mod fields;
mod generate;
mod toolbox;
mod types;
mod validate;
mod vocab;

pub use fields::{find_field, item_fields, param_matches_key};
pub use generate::{
    generate_corpus, poisson_rate_for_floored_mean, CorpusConfig, GenerateError, APP_ITEM_MEANS,
    TEST_QUERY_TARGET, TRAIN_QUERY_TARGET,
};
pub use toolbox::default_toolbox;
pub use types::{
    App, ContextItem, ContextStore, Corpus, LabeledQuery, Persona, Plan, Split, Tool, ToolParam,
};
pub use validate::{validate_corpus, validate_corpus_window, Violation};
