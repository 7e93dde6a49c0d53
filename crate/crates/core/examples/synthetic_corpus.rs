//! Writes a small synthetic corpus (problems, traces, annotations) that the
//! `currikit` binary can validate, score, order and report on.
//!
//! ```bash
//! cargo run -p currikit --example synthetic_corpus -- /tmp/corpus [K]
//! cargo run -p currikit --bin currikit -- validate --problems /tmp/corpus/problems.jsonl \
//!     --traces /tmp/corpus/traces.jsonl --annotations /tmp/corpus/annotations.jsonl \
//!     --k 8 --out /tmp/corpus/out
//! ```
//!
//! The checked-in end-to-end fixture under `tests/fixtures/corpus12` was
//! produced by this program with K = 8.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use currikit::ingest;
use currikit::model::{AnnotationRecord, CompletionSet, Problem};
use currikit::oracle::{generate_trace_for, EntropyProfile, SyntheticTraceSpec};
use currikit::prng::Prng;

/// (question, reference answer, a correct answer written differently, a wrong answer)
const ITEMS: [(&str, &str, &str, &str); 12] = [
    ("What is 6 times 7?", "42", "\\boxed{42}", "48"),
    ("Half of 1?", "\\frac{1}{2}", "0.5", "2"),
    ("What is 25% as a fraction?", "1/4", "0.25", "1/5"),
    ("Sum 999 + 1.", "1,000", "1000", "100"),
    ("Negate 3/4.", "-3/4", "-0.75", "3/4"),
    ("Third of 1 to 7 places?", "1/3", "0.3333333", "0.3"),
    ("Is 7 prime?", "yes", "Yes.", "no"),
    ("12 percent of 50?", "6", "$6$", "60"),
    ("Ten squared?", "100", "100.0", "1000"),
    ("Two fifths?", "0.4", "2/5", "0.45"),
    (
        "Large sum 1,234,567 + 1?",
        "1234568",
        "1,234,568",
        "1234567",
    ),
    ("Quarter of 2?", "\\boxed{\\frac{1}{2}}", "50%", "1/4"),
];

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "synthetic_corpus".into()));
    let k: usize = args
        .next()
        .map(|s| s.parse().expect("K must be an integer"))
        .unwrap_or(8);
    fs::create_dir_all(&dir).expect("create output directory");

    let mut rng = Prng::new(2024);
    let mut problems = Vec::new();
    let mut sets = Vec::new();
    let mut annotations = Vec::new();

    for (i, (question, reference, alt_correct, wrong)) in ITEMS.iter().enumerate() {
        let id = format!("p{:02}", i + 1);
        problems.push(Problem {
            id: id.clone(),
            question: question.to_string(),
            reference_answer: reference.to_string(),
            source_tag: Some(
                if i % 2 == 0 {
                    "synthetic-a"
                } else {
                    "synthetic-b"
                }
                .into(),
            ),
        });

        // Per-problem accuracy drifts from easy to hard across the corpus.
        let p_correct = 1.0 - i as f64 / 11.0;
        let traces = (0..k)
            .map(|c| {
                let token_count = 4 + rng.below(20) as usize;
                let candidate_counts = (0..token_count)
                    .map(|_| 1 + rng.below(5) as usize)
                    .collect();
                let profile = match (i + c) % 7 {
                    0 => EntropyProfile::Uniform,
                    1 => EntropyProfile::Deterministic,
                    _ => EntropyProfile::Random,
                };
                let spec = SyntheticTraceSpec {
                    token_count,
                    candidate_counts,
                    entropy_profile: profile,
                    seed: rng.next_u64(),
                };
                let answer = if c == k - 1 && i % 5 == 4 {
                    ""
                } else if rng.unit_open() < p_correct {
                    if c % 2 == 0 {
                        *reference
                    } else {
                        *alt_correct
                    }
                } else {
                    *wrong
                };
                generate_trace_for(&spec, &id, c, answer)
            })
            .collect();
        sets.push(CompletionSet {
            problem_id: id.clone(),
            traces,
            correctness: None,
        });
        annotations.push(AnnotationRecord {
            problem_id: id,
            rs: 1 + rng.below(8) as u32,
            sc: 1 + rng.below(5) as u8,
            cd: 1 + rng.below(5) as u8,
        });
    }

    let open = |name: &str| BufWriter::new(File::create(dir.join(name)).expect("create file"));
    ingest::write_problems(&problems, open("problems.jsonl")).expect("write problems");
    let n = ingest::write_traces(&sets, open("traces.jsonl")).expect("write traces");
    ingest::write_annotations(&annotations, open("annotations.jsonl")).expect("write annotations");
    println!(
        "wrote {} problems, {n} traces (K={k}), {} annotations to {}",
        problems.len(),
        annotations.len(),
        dir.display()
    );
}
