//! Normalising final answers and judging a completion set.
//!
//! ```bash
//! cargo run -p currikit --example answer_checking
//! ```

use currikit::answer::{equivalent, judge_set, normalize};
use currikit::model::{CompletionSet, GenerationTrace, Problem, TokenRecord};

fn main() {
    for raw in [
        "\\boxed{1,000}",
        "$-\\frac{3}{4}$",
        "0.3333333",
        "12.5%",
        "Yes.",
    ] {
        let n = normalize(raw).unwrap();
        println!("{raw:>18}  ->  {:<12} {:?}", n.canonical_text, n.kind);
    }

    let pairs = [
        ("0.5", "1/2"),
        ("0.3333333", "1/3"),
        ("0.333", "1/3"),
        ("42", "43"),
    ];
    println!();
    for (a, b) in pairs {
        let same = equivalent(&normalize(a).unwrap(), &normalize(b).unwrap());
        println!("{a:>10} vs {b:<5} {same}");
    }

    let problem = Problem {
        id: "half".into(),
        question: "What is one half?".into(),
        reference_answer: "\\boxed{1/2}".into(),
        source_tag: None,
    };
    let tok = TokenRecord::new(-0.1, vec![-0.1], 1).unwrap().0;
    let traces = ["0.5", "\\frac{1}{2}", "2", ""]
        .iter()
        .enumerate()
        .map(|(i, a)| GenerationTrace::new("half", i, 0.7, *a, vec![tok.clone()]).unwrap())
        .collect();
    let set = CompletionSet {
        problem_id: "half".into(),
        traces,
        correctness: None,
    };
    let (judged, warnings) = judge_set(&set, &problem);
    println!("\ncorrectness {:?}", judged.correctness.unwrap());
    for w in warnings {
        println!("warning: {w}");
    }
}
