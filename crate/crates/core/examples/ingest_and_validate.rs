//! Reading JSONL inputs and checking them before scoring.
//!
//! ```bash
//! cargo run -p currikit --example ingest_and_validate
//! ```

use currikit::ingest::{self, CorpusManifest};
use currikit::model::{validate_corpus, ValidationConfig};

const PROBLEMS: &str = r#"{"id":"a","question":"1+1?","reference_answer":"2"}
{"id":"b","question":"2+2?","reference_answer":"4","source_tag":"toy"}
"#;

const TRACES: &str = r#"{"problem_id":"a","completion_index":0,"temperature":0.7,"final_answer_text":"2","tokens":[{"chosen_logprob":-0.1,"topk_logprobs":[-0.1,-2.5],"candidate_count":2}]}
{"problem_id":"a","completion_index":1,"temperature":0.7,"final_answer_text":"3","tokens":[{"chosen_logprob":-1.2,"topk_logprobs":[-1.2,-0.4],"candidate_count":2}]}
{"problem_id":"b","completion_index":0,"temperature":0.7,"final_answer_text":"4","tokens":[{"chosen_logprob":-0.05,"topk_logprobs":[-0.05],"candidate_count":1}]}
"#;

const ANNOTATIONS: &str = r#"{"problem_id":"a","rs":1,"sc":1,"cd":1}
{"problem_id":"b","rs":1,"sc":2,"cd":1}
"#;

fn main() {
    let problems = ingest::read_problems(PROBLEMS.as_bytes()).unwrap().records;
    let manifest = CorpusManifest {
        k_completions: 2,
        ..CorpusManifest::default()
    };
    let traces = ingest::read_traces(TRACES.as_bytes(), &manifest).unwrap();
    for w in &traces.warnings {
        println!("ingest warning line {}: {}", w.line, w.message);
    }
    let annotations = ingest::read_annotations(ANNOTATIONS.as_bytes())
        .unwrap()
        .records;

    let config = ValidationConfig {
        k_completions: 2,
        k_topk: 5,
        permissive: false,
    };
    let report = validate_corpus(
        &problems,
        Some(&traces.records),
        Some(&annotations),
        &config,
    );
    println!("clean: {}", report.is_clean());
    for entry in report.violations().chain(report.warnings()) {
        println!("{entry:?}");
    }

    // A malformed line is reported with its position.
    let broken = "{\"id\":\"c\",\"reference_answer\":\"1\"}\n";
    println!(
        "\n{}",
        ingest::read_problems(broken.as_bytes()).unwrap_err()
    );
}
