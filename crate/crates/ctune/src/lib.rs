//! File formats, the HTTP planner adapter and the `ctune` command line
//! around [`ctune_core`].
//!
//! * [`dataset`] - the JSON-lines dataset directory.
//! * [`embeddings`] - precomputed embedding files.
//! * [`model_io`] - ranker model files and training logs.
//! * [`report`] - report CSVs, text tables and merging.
//! * [`planner_http`] - a planner that calls an HTTP endpoint.
//! * [`manifest`] - run manifests and hashed output directories.
//! * [`runner`] - parallel evaluation and trace files.
//! * [`cli`] - the subcommands.

pub mod cli;
pub mod dataset;
pub mod embeddings;
pub mod manifest;
pub mod model_io;
pub mod planner_http;
pub mod report;
pub mod runner;

pub use ctune_core as core;
