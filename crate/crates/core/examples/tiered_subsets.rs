//! Equal-count versus quantile tiers on tied scores, and writing one tier
//! out as a training file with its plan manifest.
//!
//! ```bash
//! cargo run -p currikit --example tiered_subsets
//! ```

use currikit::curriculum::{emit_plan, order_sgc, partition_tiers, EmitOptions};
use currikit::model::{Metric, MetricVector, Problem, Tier, TierRule};

fn main() {
    let values = [1.0, 1.0, 1.0, 1.0, 2.0, 3.0, 3.0, 4.0];
    let scores: Vec<MetricVector> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut s = MetricVector::empty(format!("p{i}"));
            s.slp = Some(v);
            s
        })
        .collect();

    for rule in [TierRule::EqualCount, TierRule::Quantile] {
        let p = partition_tiers(&scores, Metric::Slp, rule).unwrap();
        println!(
            "{rule:?}: low={:?} medium={:?} high={:?}",
            p.low, p.medium, p.high
        );
    }

    let problems: Vec<Problem> = (0..values.len())
        .map(|i| Problem {
            id: format!("p{i}"),
            question: format!("question {i}"),
            reference_answer: i.to_string(),
            source_tag: None,
        })
        .collect();
    let partition = partition_tiers(&scores, Metric::Slp, TierRule::EqualCount).unwrap();
    let plan = order_sgc(&partition, Tier::High, 3);
    let (mut train, mut manifest) = (Vec::new(), Vec::new());
    emit_plan(
        &plan,
        &problems,
        &mut train,
        &mut manifest,
        &EmitOptions::default(),
    )
    .unwrap();
    print!("\n{}", String::from_utf8(train).unwrap());
    println!("{}", String::from_utf8(manifest).unwrap());
}
