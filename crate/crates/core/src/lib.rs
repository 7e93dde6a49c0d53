//! # currikit
//!
//! Offline curriculum construction for reasoning training sets.
//!
//! The crate scores every training problem with problem-side difficulty
//! signals (annotated reasoning steps, symbol complexity, comprehension
//! difficulty, and sampled accuracy) and model-side signals computed from
//! serialized generation traces (sequence and token perplexity, logit gap,
//! sequence and token entropy, accuracy variance). Scores then drive
//! deterministic data orderings: forward, reverse, single tier, grouped
//! forward, grouped reverse, and a seeded shuffle baseline.
//!
//! ## Layout
//!
//! - [`model`]: domain types and corpus validation
//! - [`ingest`]: JSONL readers and writers for problems, traces,
//!   annotations, scores
//! - [`answer`]: rule-based final-answer equivalence
//! - [`metrics`]: per-trace model-side metrics and their aggregation
//! - [`outcome`]: accuracy, accuracy variance, score assembly
//! - [`curriculum`]: tiering and plan construction
//! - [`oracle`]: naive reference implementations and synthetic traces
//! - [`cli`]: the batch command surface used by the `currikit` binary
//!
//! ## Examples
//!
//! ```bash
//! cargo run -p currikit --example trace_metrics
//! cargo run -p currikit --example answer_checking
//! cargo run -p currikit --example outcome_scores
//! cargo run -p currikit --example curriculum_plans
//! cargo run -p currikit --example tiered_subsets
//! cargo run -p currikit --example ingest_and_validate
//! cargo run -p currikit --example internal_state_report
//! cargo run -p currikit --example synthetic_corpus -- /tmp/corpus
//! ```

pub mod answer;
pub mod cli;
pub mod curriculum;
pub mod digest;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod outcome;
pub mod prng;
pub mod sum;

pub use model::{
    AnnotationRecord, CompletionSet, GenerationTrace, Metric, MetricVector, Problem, TokenRecord,
};
