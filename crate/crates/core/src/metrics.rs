//! Model-side difficulty metrics computed from a single generation trace,
//! plus the reduction of per-trace values to a per-problem score.
//!
//! | metric | per trace                                        | range          |
//! |--------|--------------------------------------------------|----------------|
//! | SLP    | `exp(-mean_t ℓ_t)`                               | `[1, ∞)`       |
//! | TLP    | `exp(mean_t H_t)`, `H_t` natural-log entropy      | `[1, k]`       |
//! | LG     | mean of `ℓ_(1) - ℓ_(2)` over positions with m ≥ 2 | `[0, ∞)` or absent |
//! | SLE    | `Σ_t H2_t`, base-2 entropy                        | `[0, T log2 k]`|
//! | TLE    | `mean_t H2_t`                                     | `[0, log2 k]`  |
//!
//! Entropies use the top-k candidates renormalised to sum to one.

use std::f64::consts::LN_2;

use crate::model::{GenerationTrace, Metric, Provenance, TokenRecord};
use crate::sum::{self, CompensatedSum};

/// Candidate probabilities renormalised over the stored top-k logprobs.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDistribution {
    probs: Vec<f64>,
}

impl TruncatedDistribution {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Log-normaliser `ln Σ_j e^{ℓ_j}` evaluated with the max shift.
fn log_partition(logprobs: &[f64]) -> f64 {
    let max = logprobs[0];
    let shifted = sum::sum(logprobs.iter().map(|&lp| (lp - max).exp()));
    max + shifted.ln()
}

/// Softmax over the record's candidate logprobs.
pub fn truncate(record: &TokenRecord) -> TruncatedDistribution {
    let lps = record.topk_logprobs();
    let max = lps[0];
    let weights: Vec<f64> = lps.iter().map(|&lp| (lp - max).exp()).collect();
    let z = sum::sum(weights.iter().copied());
    TruncatedDistribution {
        probs: weights.into_iter().map(|w| w / z).collect(),
    }
}

/// Natural-log entropy of the truncated distribution at one position.
///
/// Computed in log space (`ln q_i = ℓ_i - ln Z`) and clamped into
/// `[0, ln m]`; terms whose probability underflows to zero contribute zero.
pub fn token_entropy_nats(record: &TokenRecord) -> f64 {
    let lps = record.topk_logprobs();
    if lps.len() == 1 {
        return 0.0;
    }
    let log_z = log_partition(lps);
    let mut acc = CompensatedSum::new();
    for &lp in lps {
        let log_q = lp - log_z;
        let q = log_q.exp();
        if q > 0.0 {
            acc.add(-q * log_q);
        }
    }
    acc.total().clamp(0.0, (lps.len() as f64).ln())
}

/// Base-2 entropy of the truncated distribution at one position.
pub fn token_entropy_bits(record: &TokenRecord) -> f64 {
    token_entropy_nats(record) / LN_2
}

/// Sequence-level perplexity from the emitted-token logprobs.
pub fn slp(trace: &GenerationTrace) -> f64 {
    let mean = sum::mean(trace.tokens().iter().map(TokenRecord::chosen_logprob))
        .expect("traces hold at least one token");
    (-mean).exp()
}

/// Exponential of the mean natural-log token entropy.
pub fn tlp(trace: &GenerationTrace) -> f64 {
    let mean = sum::mean(trace.tokens().iter().map(token_entropy_nats))
        .expect("traces hold at least one token");
    let widest = trace
        .tokens()
        .iter()
        .map(TokenRecord::candidate_count)
        .max()
        .unwrap_or(1);
    mean.exp().clamp(1.0, widest as f64)
}

/// Mean top-1/top-2 logprob margin over positions with at least two
/// candidates; `None` when no such position exists.
pub fn lg(trace: &GenerationTrace) -> Option<f64> {
    sum::mean(
        trace
            .tokens()
            .iter()
            .filter_map(|t| match t.topk_logprobs() {
                [first, second, ..] => Some(first - second),
                _ => None,
            }),
    )
}

/// Summed base-2 token entropy.
pub fn sle(trace: &GenerationTrace) -> f64 {
    sum::sum(trace.tokens().iter().map(token_entropy_bits))
}

/// Mean base-2 token entropy.
pub fn tle(trace: &GenerationTrace) -> f64 {
    sum::mean(trace.tokens().iter().map(token_entropy_bits))
        .expect("traces hold at least one token")
}

/// Evaluates one model-side metric on a trace. Non model-side metrics
/// return `None`.
pub fn trace_metric(trace: &GenerationTrace, metric: Metric) -> Option<f64> {
    match metric {
        Metric::Slp => Some(slp(trace)),
        Metric::Tlp => Some(tlp(trace)),
        Metric::Lg => lg(trace),
        Metric::Sle => Some(sle(trace)),
        Metric::Tle => Some(tle(trace)),
        _ => None,
    }
}

/// Per-problem reduction of per-completion values.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub value: Option<f64>,
    pub provenance: Provenance,
}

/// Mean over present values. Absent entries shrink the count and leave a
/// warning instead of failing the problem.
pub fn aggregate(per_trace: &[Option<f64>], k: usize) -> Aggregate {
    let present: Vec<f64> = per_trace.iter().filter_map(|v| *v).collect();
    let mut warnings = Vec::new();
    if per_trace.len() != k {
        warnings.push(format!("{} values for K={k}", per_trace.len()));
    }
    let missing = per_trace.len() - present.len();
    if missing > 0 && !present.is_empty() {
        warnings.push(format!(
            "{missing} of {} completions had no value",
            per_trace.len()
        ));
    } else if present.is_empty() {
        warnings.push("no completion produced a value".to_string());
    }
    Aggregate {
        value: sum::mean(present.iter().copied()),
        provenance: Provenance {
            n_completions_used: present.len(),
            warnings,
        },
    }
}
