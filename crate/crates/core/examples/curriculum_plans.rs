//! The six orderings over a toy score table.
//!
//! ```bash
//! cargo run -p currikit --example curriculum_plans
//! ```

use currikit::curriculum::{
    order_fcl, order_gfc, order_grc, order_rcl, order_sgc, order_shuf, partition_tiers,
};
use currikit::model::{Metric, MetricVector, Tier, TierRule};

fn main() {
    let accuracy = [0.9, 0.1, 0.55, 0.3, 0.3, 1.0, 0.75, 0.0, 0.45];
    let scores: Vec<MetricVector> = accuracy
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let mut v = MetricVector::empty(format!("q{i}"));
            v.acc = Some(a);
            v
        })
        .collect();

    // ACC is high for easy problems, so the ascending order runs hard to easy.
    // Pick RCL for an easy-first pass over accuracy.
    let m = Metric::Acc;
    println!("polarity of acc: {:?}", m.polarity());
    println!("FCL  {:?}", order_fcl(&scores, m).unwrap().ordering);
    println!("RCL  {:?}", order_rcl(&scores, m).unwrap().ordering);

    let tiers = partition_tiers(&scores, m, TierRule::EqualCount).unwrap();
    println!(
        "tiers low={:?} medium={:?} high={:?}",
        tiers.low, tiers.medium, tiers.high
    );
    let seed = 17;
    println!("SGC  {:?}", order_sgc(&tiers, Tier::Medium, seed).ordering);
    println!("GFC  {:?}", order_gfc(&tiers, seed).ordering);
    println!("GRC  {:?}", order_grc(&tiers, seed).ordering);
    let ids: Vec<String> = scores.iter().map(|v| v.problem_id.clone()).collect();
    println!("SHUF {:?}", order_shuf(&ids, seed).ordering);
}
