//! Curriculum plans over scored problems.
//!
//! Orderings always follow the raw metric value: forward is ascending,
//! reverse is descending. Whether ascending means easy-first depends on the
//! metric, see [`crate::model::Metric::polarity`].
//!
//! Ties are broken by position in the score list, so forward order is a
//! stable sort and reverse order is its exact mirror. Every shuffle goes
//! through [`crate::prng`]; tier `i` of a grouped plan is shuffled with
//! `seed ^ i` (low = 0, medium = 1, high = 2), which makes the grouped
//! forward, grouped reverse, and single-tier plans agree inside each tier.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{self, IngestError};
use crate::model::{
    CurriculumPlan, Metric, MetricVector, Problem, Strategy, Tier, TierBoundary, TierRule,
};
use crate::prng::{self, PRNG_NAME};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurriculumError {
    #[error("problem {problem_id} has no value for metric {metric}")]
    MissingMetric { problem_id: String, metric: Metric },
    #[error("corpus of {size} problems is too small to split into three tiers")]
    CorpusTooSmall { size: usize },
    #[error("plan references unknown problem id '{0}'")]
    UnknownId(String),
    #[error("write failure: {0}")]
    SinkFailure(String),
}

impl From<IngestError> for CurriculumError {
    fn from(e: IngestError) -> Self {
        CurriculumError::SinkFailure(e.to_string())
    }
}

/// Score-list indices sorted ascending by metric value, index as tiebreak.
fn forward_indices(
    scores: &[MetricVector],
    metric: Metric,
) -> Result<Vec<(usize, f64)>, CurriculumError> {
    let mut keyed = scores
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.get(metric)
                .map(|value| (i, value))
                .ok_or_else(|| CurriculumError::MissingMetric {
                    problem_id: v.problem_id.clone(),
                    metric,
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    keyed.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(keyed)
}

fn ids_at(scores: &[MetricVector], keyed: &[(usize, f64)]) -> Vec<String> {
    keyed
        .iter()
        .map(|&(i, _)| scores[i].problem_id.clone())
        .collect()
}

fn plan(
    strategy: Strategy,
    metric: Option<Metric>,
    seed: u64,
    ordering: Vec<String>,
) -> CurriculumPlan {
    CurriculumPlan {
        strategy,
        metric_name: metric.map(|m| m.name().to_string()).unwrap_or_default(),
        seed,
        tier_selector: None,
        tier_rule: None,
        ordering,
        tier_boundaries: None,
    }
}

/// Ascending metric order.
pub fn order_fcl(
    scores: &[MetricVector],
    metric: Metric,
) -> Result<CurriculumPlan, CurriculumError> {
    let keyed = forward_indices(scores, metric)?;
    Ok(plan(Strategy::Fcl, Some(metric), 0, ids_at(scores, &keyed)))
}

/// The forward order reversed, ties included.
pub fn order_rcl(
    scores: &[MetricVector],
    metric: Metric,
) -> Result<CurriculumPlan, CurriculumError> {
    let mut keyed = forward_indices(scores, metric)?;
    keyed.reverse();
    Ok(plan(Strategy::Rcl, Some(metric), 0, ids_at(scores, &keyed)))
}

/// Three difficulty bands, each listed in forward order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierPartition {
    pub metric_name: String,
    pub low: Vec<String>,
    pub medium: Vec<String>,
    pub high: Vec<String>,
    pub split_rule: TierRule,
}

impl TierPartition {
    pub fn tier(&self, tier: Tier) -> &[String] {
        match tier {
            Tier::Low => &self.low,
            Tier::Medium => &self.medium,
            Tier::High => &self.high,
        }
    }

    pub fn len(&self) -> usize {
        self.low.len() + self.medium.len() + self.high.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Splits the forward order into low, medium, and high tiers.
///
/// `EqualCount` cuts contiguous thirds; with `n % 3 == r` the first `r`
/// tiers take one extra item. `Quantile` assigns by value against the
/// empirical 1/3 and 2/3 quantiles (`v[ceil(p n) - 1]` of the sorted
/// values), so equal values always share a tier and tiers may be uneven or
/// empty.
pub fn partition_tiers(
    scores: &[MetricVector],
    metric: Metric,
    rule: TierRule,
) -> Result<TierPartition, CurriculumError> {
    let n = scores.len();
    let min = match rule {
        TierRule::EqualCount => 3,
        TierRule::Quantile => 1,
    };
    if n < min {
        return Err(CurriculumError::CorpusTooSmall { size: n });
    }
    let keyed = forward_indices(scores, metric)?;
    let (cut1, cut2) = match rule {
        TierRule::EqualCount => {
            let base = n / 3;
            let extra = n % 3;
            let low = base + usize::from(extra >= 1);
            let medium = base + usize::from(extra >= 2);
            (low, low + medium)
        }
        TierRule::Quantile => {
            let q1 = keyed[n.div_ceil(3) - 1].1;
            let q2 = keyed[(2 * n).div_ceil(3) - 1].1;
            let cut1 = keyed.partition_point(|&(_, v)| v <= q1);
            let cut2 = keyed.partition_point(|&(_, v)| v <= q2);
            (cut1, cut2)
        }
    };
    let ids = ids_at(scores, &keyed);
    Ok(TierPartition {
        metric_name: metric.name().to_string(),
        low: ids[..cut1].to_vec(),
        medium: ids[cut1..cut2].to_vec(),
        high: ids[cut2..].to_vec(),
        split_rule: rule,
    })
}

fn tier_shuffle(partition: &TierPartition, tier: Tier, seed: u64) -> Vec<String> {
    prng::shuffled_ids(partition.tier(tier), seed ^ tier.index())
}

fn tiered_plan(
    strategy: Strategy,
    partition: &TierPartition,
    seed: u64,
    tiers: [Tier; 3],
) -> CurriculumPlan {
    let mut ordering = Vec::with_capacity(partition.len());
    let mut boundaries = Vec::with_capacity(3);
    for tier in tiers {
        let start = ordering.len();
        ordering.extend(tier_shuffle(partition, tier, seed));
        boundaries.push(TierBoundary {
            tier,
            start,
            end: ordering.len(),
        });
    }
    CurriculumPlan {
        strategy,
        metric_name: partition.metric_name.clone(),
        seed,
        tier_selector: None,
        tier_rule: Some(partition.split_rule),
        ordering,
        tier_boundaries: Some(boundaries),
    }
}

/// Only the selected tier, shuffled.
pub fn order_sgc(partition: &TierPartition, tier: Tier, seed: u64) -> CurriculumPlan {
    let ordering = tier_shuffle(partition, tier, seed);
    let end = ordering.len();
    CurriculumPlan {
        strategy: Strategy::Sgc,
        metric_name: partition.metric_name.clone(),
        seed,
        tier_selector: Some(tier),
        tier_rule: Some(partition.split_rule),
        ordering,
        tier_boundaries: Some(vec![TierBoundary {
            tier,
            start: 0,
            end,
        }]),
    }
}

/// Shuffled low, then medium, then high.
pub fn order_gfc(partition: &TierPartition, seed: u64) -> CurriculumPlan {
    tiered_plan(
        Strategy::Gfc,
        partition,
        seed,
        [Tier::Low, Tier::Medium, Tier::High],
    )
}

/// Shuffled high, then medium, then low.
pub fn order_grc(partition: &TierPartition, seed: u64) -> CurriculumPlan {
    tiered_plan(
        Strategy::Grc,
        partition,
        seed,
        [Tier::High, Tier::Medium, Tier::Low],
    )
}

/// Seeded shuffle of the whole corpus.
pub fn order_shuf(ids: &[String], seed: u64) -> CurriculumPlan {
    plan(Strategy::Shuf, None, seed, prng::shuffled_ids(ids, seed))
}

/// The `plan.json` document written next to the reordered training file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanManifest {
    pub strategy: Strategy,
    pub metric: Option<String>,
    pub seed: u64,
    pub prng: String,
    pub tier_rule: Option<TierRule>,
    pub tier: Option<Tier>,
    pub tier_boundaries: Option<Vec<TierBoundary>>,
    pub repeat: usize,
    pub records: usize,
    pub ordering_digest: String,
    pub input_digests: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitOptions {
    /// Number of verbatim passes over the ordering (at least one).
    pub repeat: usize,
    /// Digests of the files the plan was built from, keyed by role.
    pub input_digests: BTreeMap<String, String>,
}

impl Default for EmitOptions {
    fn default() -> Self {
        Self {
            repeat: 1,
            input_digests: BTreeMap::new(),
        }
    }
}

/// Writes the problems in plan order to `train_sink` and the plan manifest
/// to `manifest_sink`. Returns the number of training lines written.
pub fn emit_plan<W: Write, M: Write>(
    plan: &CurriculumPlan,
    problems: &[Problem],
    mut train_sink: W,
    mut manifest_sink: M,
    options: &EmitOptions,
) -> Result<usize, CurriculumError> {
    let by_id: HashMap<&str, &Problem> = problems.iter().map(|p| (p.id.as_str(), p)).collect();
    let ordered = plan
        .ordering
        .iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .copied()
                .ok_or_else(|| CurriculumError::UnknownId(id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let repeat = options.repeat.max(1);
    let mut written = 0;
    for _ in 0..repeat {
        written += ingest::write_problems(ordered.iter().copied(), &mut train_sink)?;
    }

    let manifest = PlanManifest {
        strategy: plan.strategy,
        metric: (!plan.metric_name.is_empty()).then(|| plan.metric_name.clone()),
        seed: plan.seed,
        prng: PRNG_NAME.to_string(),
        tier_rule: plan.tier_rule,
        tier: plan.tier_selector,
        tier_boundaries: plan.tier_boundaries.clone(),
        repeat,
        records: written,
        ordering_digest: crate::digest::sha256_hex(plan.ordering.join("\n").as_bytes()),
        input_digests: options.input_digests.clone(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CurriculumError::SinkFailure(e.to_string()))?;
    text.push('\n');
    manifest_sink
        .write_all(text.as_bytes())
        .map_err(|e| CurriculumError::SinkFailure(e.to_string()))?;
    Ok(written)
}
