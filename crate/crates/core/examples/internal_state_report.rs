//! Comparing average model-side metrics across two trace sets, each read
//! through a seeded sample of problems.
//!
//! ```bash
//! cargo run -p currikit --example internal_state_report
//! ```

use currikit::cli::{sample_report, score_problem};
use currikit::model::{CompletionSet, Metric, MetricVector, Problem};
use currikit::oracle::{self, EntropyProfile, SyntheticTraceSpec};

fn scores_for(problems: &[Problem], profile: EntropyProfile) -> Vec<MetricVector> {
    problems
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let traces = (0..4)
                .map(|c| {
                    let spec = SyntheticTraceSpec::constant(16, 5, profile, (i * 4 + c) as u64);
                    oracle::generate_trace_for(&spec, &p.id, c, &p.reference_answer)
                })
                .collect();
            let set = CompletionSet {
                problem_id: p.id.clone(),
                traces,
                correctness: None,
            };
            score_problem(p, Some(&set), None, &Metric::MODEL_SIDE, 4).unwrap()
        })
        .collect()
}

fn main() {
    let problems: Vec<Problem> = (0..40)
        .map(|i| Problem {
            id: format!("p{i:02}"),
            question: format!("q{i}"),
            reference_answer: i.to_string(),
            source_tag: None,
        })
        .collect();

    let before = scores_for(&problems, EntropyProfile::Random);
    let after = scores_for(&problems, EntropyProfile::Deterministic);
    let metrics = [Metric::Tlp, Metric::Tle, Metric::Lg];
    let a = sample_report(&before, &metrics, 20, 0).unwrap();
    let b = sample_report(&after, &metrics, 20, 0).unwrap();
    assert_eq!(a.sampled_ids, b.sampled_ids);

    println!("{:<6}{:>12}{:>12}", "metric", "before", "after");
    for m in metrics {
        let name = m.name();
        println!(
            "{name:<6}{:>12.4}{:>12.4}",
            a.metrics[name].mean.unwrap_or(f64::NAN),
            b.metrics[name].mean.unwrap_or(f64::NAN)
        );
    }
}
