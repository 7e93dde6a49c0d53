//! Reference implementations and synthetic traces for testing.
//!
//! The oracle functions transliterate each metric formula directly: plain
//! `e^ℓ / Σ e^ℓ` without a max shift, plain `+=` loops, `log2` called on
//! each probability. They share no code with [`crate::metrics`] or
//! [`crate::sum`] and are only meant for small inputs.

use thiserror::Error;

use crate::model::{GenerationTrace, Metric, TokenRecord};
use crate::prng::Prng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyProfile {
    /// Equal logprobs at every position.
    Uniform,
    /// One near-certain candidate; the others underflow after softmax.
    Deterministic,
    /// Dirichlet(1) candidate weights scaled by a random top-k mass.
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticTraceSpec {
    pub token_count: usize,
    pub candidate_counts: Vec<usize>,
    pub entropy_profile: EntropyProfile,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("token_count must be at least 1")]
    NoTokens,
    #[error("{given} candidate counts for {token_count} tokens")]
    LengthMismatch { given: usize, token_count: usize },
    #[error("candidate count {count} at position {position} outside 1..={k}")]
    CandidateCount {
        position: usize,
        count: usize,
        k: usize,
    },
}

impl SyntheticTraceSpec {
    /// Same candidate count at every position.
    pub fn constant(
        token_count: usize,
        candidates: usize,
        profile: EntropyProfile,
        seed: u64,
    ) -> Self {
        Self {
            token_count,
            candidate_counts: vec![candidates; token_count],
            entropy_profile: profile,
            seed,
        }
    }

    pub fn check(&self, k_topk: usize) -> Result<(), SpecError> {
        if self.token_count == 0 {
            return Err(SpecError::NoTokens);
        }
        if self.candidate_counts.len() != self.token_count {
            return Err(SpecError::LengthMismatch {
                given: self.candidate_counts.len(),
                token_count: self.token_count,
            });
        }
        for (position, &count) in self.candidate_counts.iter().enumerate() {
            if count == 0 || count > k_topk {
                return Err(SpecError::CandidateCount {
                    position,
                    count,
                    k: k_topk,
                });
            }
        }
        Ok(())
    }
}

const DETERMINISTIC_TOP: f64 = -1e-9;
const DETERMINISTIC_REST: f64 = -1000.0;

fn position_logprobs(profile: EntropyProfile, m: usize, rng: &mut Prng) -> (f64, Vec<f64>) {
    match profile {
        EntropyProfile::Uniform => {
            let lp = (1.0 / m as f64).ln();
            (lp, vec![lp; m])
        }
        EntropyProfile::Deterministic => {
            let mut lps = vec![DETERMINISTIC_REST; m];
            lps[0] = DETERMINISTIC_TOP;
            (DETERMINISTIC_TOP, lps)
        }
        EntropyProfile::Random => {
            let weights: Vec<f64> = (0..m).map(|_| -rng.unit_open().ln()).collect();
            let total: f64 = weights.iter().sum();
            let mass = 0.5 + 0.5 * rng.unit_open();
            let mut probs: Vec<f64> = weights.iter().map(|w| mass * w / total).collect();
            probs.sort_by(|a, b| b.total_cmp(a));
            // Emitted token drawn from the candidates in proportion to mass.
            let mut r = rng.unit_open() * mass;
            let mut chosen = probs[m - 1];
            for &p in &probs {
                if r < p {
                    chosen = p;
                    break;
                }
                r -= p;
            }
            let lps = probs.iter().map(|p| p.ln()).collect();
            (chosen.ln(), lps)
        }
    }
}

/// Builds a trace for `problem_id` from a synthetic spec. Panics if the spec
/// fails [`SyntheticTraceSpec::check`] against `k = 5`.
pub fn generate_trace_for(
    spec: &SyntheticTraceSpec,
    problem_id: &str,
    completion_index: usize,
    final_answer_text: &str,
) -> GenerationTrace {
    spec.check(crate::model::DEFAULT_K_TOPK)
        .expect("synthetic spec must be valid");
    let mut rng = Prng::new(spec.seed);
    let tokens = spec
        .candidate_counts
        .iter()
        .map(|&m| {
            let (chosen, lps) = position_logprobs(spec.entropy_profile, m, &mut rng);
            TokenRecord::new(chosen, lps, m)
                .expect("generated logprobs are finite and non-positive")
                .0
        })
        .collect();
    GenerationTrace::new(problem_id, completion_index, 0.7, final_answer_text, tokens)
        .expect("token_count >= 1")
}

pub fn generate_trace(spec: &SyntheticTraceSpec) -> GenerationTrace {
    generate_trace_for(spec, "synthetic", 0, "")
}

/// `n` traces with random length `1..=max_tokens`, random per-position
/// candidate counts `1..=k`, and a mix of profiles weighted towards random.
pub fn fuzz_traces(n: usize, max_tokens: usize, k: usize, seed: u64) -> Vec<GenerationTrace> {
    let mut rng = Prng::new(seed);
    (0..n)
        .map(|i| {
            let token_count = 1 + rng.below(max_tokens as u64) as usize;
            let candidate_counts = (0..token_count)
                .map(|_| 1 + rng.below(k as u64) as usize)
                .collect();
            let entropy_profile = match rng.below(10) {
                0 => EntropyProfile::Uniform,
                1 => EntropyProfile::Deterministic,
                _ => EntropyProfile::Random,
            };
            let spec = SyntheticTraceSpec {
                token_count,
                candidate_counts,
                entropy_profile,
                seed: rng.next_u64(),
            };
            generate_trace_for(&spec, &format!("fuzz{i}"), 0, "")
        })
        .collect()
}

fn naive_distribution(token: &TokenRecord) -> Vec<f64> {
    let mut z = 0.0;
    for &lp in token.topk_logprobs() {
        z += lp.exp();
    }
    token
        .topk_logprobs()
        .iter()
        .map(|&lp| lp.exp() / z)
        .collect()
}

fn naive_entropy(token: &TokenRecord, log: fn(f64) -> f64) -> f64 {
    let mut h = 0.0;
    for q in naive_distribution(token) {
        if q > 0.0 {
            h -= q * log(q);
        }
    }
    h
}

/// Direct evaluation of one model-side metric. `None` for LG when no
/// position has two candidates, and for metrics that are not model-side.
pub fn oracle_metric(trace: &GenerationTrace, metric: Metric) -> Option<f64> {
    let tokens = trace.tokens();
    let t = tokens.len() as f64;
    match metric {
        Metric::Slp => {
            let mut total = 0.0;
            for tok in tokens {
                total += tok.chosen_logprob();
            }
            Some((-total / t).exp())
        }
        Metric::Tlp => {
            let mut total = 0.0;
            for tok in tokens {
                total += naive_entropy(tok, f64::ln);
            }
            Some((total / t).exp())
        }
        Metric::Lg => {
            let mut total = 0.0;
            let mut used = 0usize;
            for tok in tokens {
                if tok.candidate_count() >= 2 {
                    total += tok.topk_logprobs()[0] - tok.topk_logprobs()[1];
                    used += 1;
                }
            }
            (used > 0).then(|| total / used as f64)
        }
        Metric::Sle => {
            let mut total = 0.0;
            for tok in tokens {
                total += naive_entropy(tok, f64::log2);
            }
            Some(total)
        }
        Metric::Tle => {
            let mut total = 0.0;
            for tok in tokens {
                total += naive_entropy(tok, f64::log2);
            }
            Some(total / t)
        }
        _ => None,
    }
}

/// Mean squared deviation of the correctness indicators from their mean.
pub fn oracle_vacc(flags: &[bool]) -> f64 {
    assert!(!flags.is_empty(), "K must be at least 1");
    let k = flags.len() as f64;
    let mut hits = 0.0;
    for &z in flags {
        if z {
            hits += 1.0;
        }
    }
    let p = hits / k;
    let mut dev = 0.0;
    for &z in flags {
        let x = if z { 1.0 } else { 0.0 };
        dev += (x - p) * (x - p);
    }
    dev / k
}
