//! Accuracy, accuracy variance, and a full score vector for one problem.
//!
//! ```bash
//! cargo run -p currikit --example outcome_scores
//! ```

use currikit::cli::score_problem;
use currikit::model::{AnnotationRecord, CompletionSet, Metric, Problem};
use currikit::oracle::{self, EntropyProfile, SyntheticTraceSpec};
use currikit::outcome::{acc, vacc};

fn main() {
    let flags = vec![true, true, false, true, false, true, true, true];
    let set = CompletionSet {
        problem_id: "p".into(),
        traces: Vec::new(),
        correctness: Some(flags),
    };
    println!("acc  = {}", acc(&set).unwrap());
    println!("vacc = {}", vacc(&set).unwrap());

    let problem = Problem {
        id: "p7".into(),
        question: "7 * 6?".into(),
        reference_answer: "42".into(),
        source_tag: None,
    };
    let traces = (0..6)
        .map(|i| {
            let spec = SyntheticTraceSpec::constant(12, 5, EntropyProfile::Random, i as u64);
            oracle::generate_trace_for(
                &spec,
                "p7",
                i,
                if i % 3 == 0 { "41" } else { "\\boxed{42}" },
            )
        })
        .collect();
    let set = CompletionSet {
        problem_id: "p7".into(),
        traces,
        correctness: None,
    };
    let annotation = AnnotationRecord {
        problem_id: "p7".into(),
        rs: 2,
        sc: 1,
        cd: 1,
    };

    let v = score_problem(&problem, Some(&set), Some(&annotation), &Metric::ALL, 6).unwrap();
    println!("\n{}", serde_json::to_string_pretty(&v).unwrap());
}
