//! Model-side metrics on hand-built traces.
//!
//! ```bash
//! cargo run -p currikit --example trace_metrics
//! ```

use currikit::metrics::{self, truncate};
use currikit::model::{GenerationTrace, Metric, TokenRecord};
use currikit::oracle::{self, EntropyProfile, SyntheticTraceSpec};

fn token(logprobs: &[f64]) -> TokenRecord {
    TokenRecord::new(logprobs[0], logprobs.to_vec(), logprobs.len())
        .expect("valid logprobs")
        .0
}

fn show(label: &str, trace: &GenerationTrace) {
    print!("{label:<14}");
    for m in Metric::MODEL_SIDE {
        match metrics::trace_metric(trace, m) {
            Some(v) => print!(" {}={v:<9.4}", m.name()),
            None => print!(" {}=absent   ", m.name()),
        }
    }
    println!();
}

fn main() {
    let confident = token(&[-0.02, -4.5, -6.0]);
    let torn = token(&[-0.69, -0.71, -3.0, -5.0]);
    let single = token(&[-0.3]);
    println!("truncated distribution of {:?}:", torn.topk_logprobs());
    println!("  {:?}\n", truncate(&torn).probs());

    let mixed = GenerationTrace::new("demo", 0, 0.7, "12", vec![confident, torn, single]).unwrap();
    show("mixed", &mixed);

    let uniform = oracle::generate_trace(&SyntheticTraceSpec::constant(
        8,
        5,
        EntropyProfile::Uniform,
        0,
    ));
    show("uniform(5)", &uniform);
    let sure = oracle::generate_trace(&SyntheticTraceSpec::constant(
        8,
        5,
        EntropyProfile::Deterministic,
        0,
    ));
    show("deterministic", &sure);

    // Per-problem scores average over the K completions.
    let completions: Vec<_> = (0..4)
        .map(|seed| {
            oracle::generate_trace(&SyntheticTraceSpec::constant(
                10,
                5,
                EntropyProfile::Random,
                seed,
            ))
        })
        .collect();
    let per_trace: Vec<Option<f64>> = completions.iter().map(metrics::lg).collect();
    let agg = metrics::aggregate(&per_trace, 4);
    println!(
        "\nLG over 4 completions: {:?} (used {})",
        agg.value, agg.provenance.n_completions_used
    );
}
