//! Domain types shared by every stage, plus whole-corpus validation.
//!
//! All log-probabilities are natural-log units. Conversions to base 2 happen
//! only inside the entropy formulas in [`crate::metrics`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default number of sampled completions per problem.
pub const DEFAULT_K_COMPLETIONS: usize = 20;
/// Default number of top candidates retained per token position.
pub const DEFAULT_K_TOPK: usize = 5;
/// Default decoding temperature for trace collection.
pub const DEFAULT_TEMPERATURE: f64 = 0.7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("logprob {value} at {slot} is not finite")]
    NonFiniteLogprob { slot: LogprobSlot, value: f64 },
    #[error("logprob {value} at {slot} is positive")]
    PositiveLogprob { slot: LogprobSlot, value: f64 },
    #[error("candidate_count {declared} does not match {actual} stored candidates")]
    CandidateCountMismatch { declared: usize, actual: usize },
    #[error("token has no candidates")]
    NoCandidates,
    #[error("trace {completion_index} of problem {problem_id} has no tokens")]
    EmptyTrace {
        problem_id: String,
        completion_index: usize,
    },
}

/// Which logprob inside a token record an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogprobSlot {
    Chosen,
    Candidate(usize),
}

impl fmt::Display for LogprobSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Chosen => f.write_str("chosen token"),
            Self::Candidate(i) => write!(f, "candidate {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub id: String,
    pub question: String,
    pub reference_answer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_tag: Option<String>,
}

/// One generated position: the emitted token's logprob and the sorted top-k
/// candidate logprobs. The emitted token is not assumed to be among the
/// candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTokenRecord")]
pub struct TokenRecord {
    chosen_logprob: f64,
    topk_logprobs: Vec<f64>,
    candidate_count: usize,
}

#[derive(Deserialize)]
struct RawTokenRecord {
    chosen_logprob: f64,
    topk_logprobs: Vec<f64>,
    candidate_count: usize,
}

impl TryFrom<RawTokenRecord> for TokenRecord {
    type Error = ModelError;

    fn try_from(raw: RawTokenRecord) -> Result<Self, Self::Error> {
        TokenRecord::new(raw.chosen_logprob, raw.topk_logprobs, raw.candidate_count)
            .map(|(record, _)| record)
    }
}

fn check_logprob(value: f64, slot: LogprobSlot) -> Result<(), ModelError> {
    if !value.is_finite() {
        Err(ModelError::NonFiniteLogprob { slot, value })
    } else if value > 0.0 {
        Err(ModelError::PositiveLogprob { slot, value })
    } else {
        Ok(())
    }
}

impl TokenRecord {
    /// Builds a record, sorting the candidates descending when they arrive in
    /// another order. The returned flag is `true` when a sort was needed.
    pub fn new(
        chosen_logprob: f64,
        mut topk_logprobs: Vec<f64>,
        candidate_count: usize,
    ) -> Result<(Self, bool), ModelError> {
        check_logprob(chosen_logprob, LogprobSlot::Chosen)?;
        for (i, &lp) in topk_logprobs.iter().enumerate() {
            check_logprob(lp, LogprobSlot::Candidate(i))?;
        }
        if topk_logprobs.is_empty() {
            return Err(ModelError::NoCandidates);
        }
        if candidate_count != topk_logprobs.len() {
            return Err(ModelError::CandidateCountMismatch {
                declared: candidate_count,
                actual: topk_logprobs.len(),
            });
        }
        let sorted = topk_logprobs.windows(2).all(|w| w[0] >= w[1]);
        if !sorted {
            topk_logprobs.sort_by(|a, b| b.total_cmp(a));
        }
        Ok((
            Self {
                chosen_logprob,
                topk_logprobs,
                candidate_count,
            },
            !sorted,
        ))
    }

    pub fn chosen_logprob(&self) -> f64 {
        self.chosen_logprob
    }

    pub fn topk_logprobs(&self) -> &[f64] {
        &self.topk_logprobs
    }

    pub fn candidate_count(&self) -> usize {
        self.candidate_count
    }
}

/// One sampled completion (response tokens only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrace")]
pub struct GenerationTrace {
    pub problem_id: String,
    pub completion_index: usize,
    pub temperature: f64,
    pub final_answer_text: String,
    tokens: Vec<TokenRecord>,
}

#[derive(Deserialize)]
struct RawTrace {
    problem_id: String,
    completion_index: usize,
    temperature: f64,
    final_answer_text: String,
    tokens: Vec<TokenRecord>,
}

impl TryFrom<RawTrace> for GenerationTrace {
    type Error = ModelError;

    fn try_from(raw: RawTrace) -> Result<Self, Self::Error> {
        GenerationTrace::new(
            raw.problem_id,
            raw.completion_index,
            raw.temperature,
            raw.final_answer_text,
            raw.tokens,
        )
    }
}

impl GenerationTrace {
    pub fn new(
        problem_id: impl Into<String>,
        completion_index: usize,
        temperature: f64,
        final_answer_text: impl Into<String>,
        tokens: Vec<TokenRecord>,
    ) -> Result<Self, ModelError> {
        let problem_id = problem_id.into();
        if tokens.is_empty() {
            return Err(ModelError::EmptyTrace {
                problem_id,
                completion_index,
            });
        }
        Ok(Self {
            problem_id,
            completion_index,
            temperature,
            final_answer_text: final_answer_text.into(),
            tokens,
        })
    }

    /// Token records in generation order; never empty.
    pub fn tokens(&self) -> &[TokenRecord] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The K traces of one problem and, once judged, their correctness flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionSet {
    pub problem_id: String,
    pub traces: Vec<GenerationTrace>,
    #[serde(default)]
    pub correctness: Option<Vec<bool>>,
}

impl CompletionSet {
    pub fn k(&self) -> usize {
        self.traces.len()
    }
}

/// Judge-model annotations for one problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub problem_id: String,
    /// Reasoning steps.
    pub rs: u32,
    /// Symbol complexity, 1..=5.
    pub sc: u8,
    /// Comprehension difficulty, 1..=5.
    pub cd: u8,
}

impl AnnotationRecord {
    /// Range problems with this record, one message per field.
    pub fn range_issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if !(1..=5).contains(&self.sc) {
            issues.push("sc out of range".to_string());
        }
        if !(1..=5).contains(&self.cd) {
            issues.push("cd out of range".to_string());
        }
        issues
    }
}

/// Every difficulty signal the toolkit knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Slp,
    Tlp,
    Lg,
    Sle,
    Tle,
    Acc,
    Vacc,
    Rs,
    Sc,
    Cd,
}

/// What a larger raw value means for a metric. Plans always sort by raw
/// value; this table only documents how to read the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    HigherIsHarder,
    LowerIsHarder,
    /// Higher means less stable outcomes (peaks at 50% accuracy).
    HigherIsLessStable,
}

impl Metric {
    pub const ALL: [Metric; 10] = [
        Metric::Slp,
        Metric::Tlp,
        Metric::Lg,
        Metric::Sle,
        Metric::Tle,
        Metric::Acc,
        Metric::Vacc,
        Metric::Rs,
        Metric::Sc,
        Metric::Cd,
    ];

    pub const MODEL_SIDE: [Metric; 5] = [
        Metric::Slp,
        Metric::Tlp,
        Metric::Lg,
        Metric::Sle,
        Metric::Tle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Slp => "slp",
            Metric::Tlp => "tlp",
            Metric::Lg => "lg",
            Metric::Sle => "sle",
            Metric::Tle => "tle",
            Metric::Acc => "acc",
            Metric::Vacc => "vacc",
            Metric::Rs => "rs",
            Metric::Sc => "sc",
            Metric::Cd => "cd",
        }
    }

    pub fn polarity(self) -> Polarity {
        match self {
            Metric::Acc | Metric::Lg => Polarity::LowerIsHarder,
            Metric::Vacc => Polarity::HigherIsLessStable,
            _ => Polarity::HigherIsHarder,
        }
    }

    pub fn is_model_side(self) -> bool {
        Self::MODEL_SIDE.contains(&self)
    }

    pub fn needs_annotations(self) -> bool {
        matches!(self, Metric::Rs | Metric::Sc | Metric::Cd)
    }

    pub fn needs_traces(self) -> bool {
        !self.needs_annotations()
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown metric '{0}'")]
pub struct UnknownMetric(pub String);

impl FromStr for Metric {
    type Err = UnknownMetric;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownMetric(s.to_string()))
    }
}

/// How many completions contributed to a metric and what was skipped.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub n_completions_used: usize,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// Per-problem scores. Absent metrics serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    pub problem_id: String,
    pub slp: Option<f64>,
    pub tlp: Option<f64>,
    pub lg: Option<f64>,
    pub sle: Option<f64>,
    pub tle: Option<f64>,
    pub acc: Option<f64>,
    pub vacc: Option<f64>,
    pub rs: Option<u32>,
    pub sc: Option<u8>,
    pub cd: Option<u8>,
    #[serde(default)]
    pub provenance: BTreeMap<String, Provenance>,
}

impl MetricVector {
    pub fn empty(problem_id: impl Into<String>) -> Self {
        Self {
            problem_id: problem_id.into(),
            slp: None,
            tlp: None,
            lg: None,
            sle: None,
            tle: None,
            acc: None,
            vacc: None,
            rs: None,
            sc: None,
            cd: None,
            provenance: BTreeMap::new(),
        }
    }

    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Slp => self.slp,
            Metric::Tlp => self.tlp,
            Metric::Lg => self.lg,
            Metric::Sle => self.sle,
            Metric::Tle => self.tle,
            Metric::Acc => self.acc,
            Metric::Vacc => self.vacc,
            Metric::Rs => self.rs.map(f64::from),
            Metric::Sc => self.sc.map(f64::from),
            Metric::Cd => self.cd.map(f64::from),
        }
    }

    /// Sets a real-valued model-side metric. Other metrics are ignored.
    pub fn set_model_side(&mut self, metric: Metric, value: Option<f64>) {
        match metric {
            Metric::Slp => self.slp = value,
            Metric::Tlp => self.tlp = value,
            Metric::Lg => self.lg = value,
            Metric::Sle => self.sle = value,
            Metric::Tle => self.tle = value,
            _ => {}
        }
    }

    /// Invariant violations; empty when the vector is well formed.
    pub fn invariant_issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        for m in Metric::ALL {
            if let Some(v) = self.get(m) {
                if !v.is_finite() {
                    issues.push(format!("{m} is not finite"));
                }
            }
        }
        match (self.acc, self.vacc) {
            (Some(acc), Some(vacc)) => {
                if !(0.0..=1.0).contains(&acc) {
                    issues.push("acc outside [0, 1]".into());
                }
                if (vacc - acc * (1.0 - acc)).abs() > 1e-12 {
                    issues.push("vacc != acc * (1 - acc)".into());
                }
            }
            (Some(_), None) => issues.push("acc present without vacc".into()),
            (None, Some(_)) => issues.push("vacc present without acc".into()),
            (None, None) => {}
        }
        issues
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Strategy {
    Fcl,
    Rcl,
    Sgc,
    Gfc,
    Grc,
    Shuf,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Fcl => "FCL",
            Strategy::Rcl => "RCL",
            Strategy::Sgc => "SGC",
            Strategy::Gfc => "GFC",
            Strategy::Grc => "GRC",
            Strategy::Shuf => "SHUF",
        }
    }

    pub fn needs_metric(self) -> bool {
        self != Strategy::Shuf
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Low,
    Medium,
    High,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Low, Tier::Medium, Tier::High];

    pub fn index(self) -> u64 {
        match self {
            Tier::Low => 0,
            Tier::Medium => 1,
            Tier::High => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TierRule {
    #[default]
    EqualCount,
    Quantile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TierBoundary {
    pub tier: Tier,
    pub start: usize,
    /// Exclusive.
    pub end: usize,
}

/// A deterministic ordering of problem ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurriculumPlan {
    pub strategy: Strategy,
    /// Empty for the shuffle baseline.
    pub metric_name: String,
    pub seed: u64,
    pub tier_selector: Option<Tier>,
    pub tier_rule: Option<TierRule>,
    pub ordering: Vec<String>,
    pub tier_boundaries: Option<Vec<TierBoundary>>,
}

// ---------------------------------------------------------------------------
// Corpus validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Violation,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub problem_id: String,
    pub severity: Severity,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub entries: Vec<ReportEntry>,
}

impl ValidationReport {
    fn push(&mut self, problem_id: &str, severity: Severity, message: impl Into<String>) {
        self.entries.push(ReportEntry {
            problem_id: problem_id.to_string(),
            severity,
            message: message.into(),
        });
    }

    pub fn violations(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries
            .iter()
            .filter(|e| e.severity == Severity::Violation)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries
            .iter()
            .filter(|e| e.severity == Severity::Warning)
    }

    pub fn is_clean(&self) -> bool {
        self.violations().next().is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationConfig {
    pub k_completions: usize,
    pub k_topk: usize,
    /// Downgrades K mismatches to warnings.
    pub permissive: bool,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            k_completions: DEFAULT_K_COMPLETIONS,
            k_topk: DEFAULT_K_TOPK,
            permissive: false,
        }
    }
}

/// Checks cross-file consistency and every type invariant. `sets` and
/// `annotations` are `None` when that input was not supplied at all.
pub fn validate_corpus(
    problems: &[Problem],
    sets: Option<&[CompletionSet]>,
    annotations: Option<&[AnnotationRecord]>,
    config: &ValidationConfig,
) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut seen = HashSet::new();
    for p in problems {
        if p.id.is_empty() {
            report.push(&p.id, Severity::Violation, "empty problem id");
        } else if !seen.insert(p.id.as_str()) {
            report.push(&p.id, Severity::Violation, "duplicate problem id");
        }
        if p.question.trim().is_empty() {
            report.push(&p.id, Severity::Violation, "empty question");
        }
    }

    if let Some(sets) = sets {
        let mut by_id: HashMap<&str, &CompletionSet> = HashMap::new();
        for set in sets {
            if by_id.insert(set.problem_id.as_str(), set).is_some() {
                report.push(
                    &set.problem_id,
                    Severity::Violation,
                    "duplicate completion set",
                );
            }
            if !seen.contains(set.problem_id.as_str()) {
                report.push(
                    &set.problem_id,
                    Severity::Violation,
                    "completion set for unknown problem",
                );
            }
        }
        for p in problems {
            match by_id.get(p.id.as_str()) {
                None => report.push(&p.id, Severity::Violation, "missing completion set"),
                Some(set) => check_set(set, config, &mut report),
            }
        }
    }

    if let Some(annotations) = annotations {
        let mut by_id: HashMap<&str, &AnnotationRecord> = HashMap::new();
        for a in annotations {
            if by_id.insert(a.problem_id.as_str(), a).is_some() {
                report.push(&a.problem_id, Severity::Violation, "duplicate annotation");
            }
            if !seen.contains(a.problem_id.as_str()) {
                report.push(
                    &a.problem_id,
                    Severity::Violation,
                    "annotation for unknown problem",
                );
            }
            for issue in a.range_issues() {
                report.push(&a.problem_id, Severity::Violation, issue);
            }
        }
        for p in problems {
            if !by_id.contains_key(p.id.as_str()) {
                report.push(&p.id, Severity::Violation, "missing annotation");
            }
        }
    }

    report
}

fn check_set(set: &CompletionSet, config: &ValidationConfig, report: &mut ValidationReport) {
    let id = set.problem_id.as_str();
    let k = set.traces.len();
    if k != config.k_completions {
        let severity = if config.permissive {
            Severity::Warning
        } else {
            Severity::Violation
        };
        report.push(
            id,
            severity,
            format!("K mismatch: {k}/{}", config.k_completions),
        );
    }
    if let Some(flags) = &set.correctness {
        if flags.len() != k {
            report.push(
                id,
                Severity::Violation,
                format!("correctness length {} != {k} traces", flags.len()),
            );
        }
    }
    let mut indices = HashSet::new();
    for trace in &set.traces {
        if trace.problem_id != set.problem_id {
            report.push(
                id,
                Severity::Violation,
                format!("trace belongs to problem {}", trace.problem_id),
            );
        }
        if !indices.insert(trace.completion_index) {
            report.push(
                id,
                Severity::Violation,
                format!("duplicate completion_index {}", trace.completion_index),
            );
        }
        if trace.completion_index >= config.k_completions.max(k) {
            report.push(
                id,
                Severity::Violation,
                format!("completion_index {} out of range", trace.completion_index),
            );
        }
        if trace.temperature.is_nan() || trace.temperature <= 0.0 {
            report.push(
                id,
                Severity::Violation,
                format!(
                    "non-positive temperature in completion {}",
                    trace.completion_index
                ),
            );
        }
        for (pos, token) in trace.tokens().iter().enumerate() {
            if token.candidate_count() > config.k_topk {
                report.push(
                    id,
                    Severity::Violation,
                    format!(
                        "completion {} position {pos}: {} candidates exceed k={}",
                        trace.completion_index,
                        token.candidate_count(),
                        config.k_topk
                    ),
                );
            }
        }
    }
}
