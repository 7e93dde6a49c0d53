//! JSONL wire formats.
//!
//! ```text
//! problems.jsonl     {"id","question","reference_answer","source_tag"?}
//! traces.jsonl       {"problem_id","completion_index","temperature","final_answer_text",
//!                     "tokens":[{"chosen_logprob","topk_logprobs":[...],"candidate_count"}]}
//! annotations.jsonl  {"problem_id","rs","sc","cd"}
//! scores.jsonl       {"problem_id","slp","tlp","lg","sle","tle","acc","vacc","rs","sc","cd",
//!                     "provenance"}
//! manifest.json      CorpusManifest
//! ```
//!
//! Readers stop at the first fatal record and report its 1-based line.
//! Repairs (unsorted candidates, temperature drift) go to the warning list,
//! also with line numbers. Reals are written with the shortest decimal that
//! round-trips, so re-serialisation is byte-stable.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::model::{
    AnnotationRecord, CompletionSet, GenerationTrace, MetricVector, ModelError, Problem,
    TokenRecord, DEFAULT_K_COMPLETIONS, DEFAULT_K_TOPK, DEFAULT_TEMPERATURE,
};

pub const SCHEMA_VERSION: &str = "currikit.v1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("read failure: {0}")]
    Io(String),
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: duplicate id '{id}'")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: non-finite logprob for problem {problem_id} at position {position}")]
    NonFiniteLogprob {
        line: usize,
        problem_id: String,
        position: usize,
    },
    #[error("line {line}: positive logprob for problem {problem_id} at position {position}")]
    PositiveLogprob {
        line: usize,
        problem_id: String,
        position: usize,
    },
    #[error("line {line}: completion {completion_index} of problem {problem_id} has no tokens")]
    EmptyTrace {
        line: usize,
        problem_id: String,
        completion_index: usize,
    },
    #[error(
        "line {line}: problem {problem_id} position {position}: candidate_count {declared} \
         but {actual} candidates"
    )]
    CandidateCountMismatch {
        line: usize,
        problem_id: String,
        position: usize,
        declared: usize,
        actual: usize,
    },
    #[error(
        "line {line}: problem {problem_id} position {position}: {count} candidates, \
         expected 1..={k}"
    )]
    CandidateCountOutOfRange {
        line: usize,
        problem_id: String,
        position: usize,
        count: usize,
        k: usize,
    },
    #[error("line {line}: duplicate completion {completion_index} for problem {problem_id}")]
    DuplicateCompletion {
        line: usize,
        problem_id: String,
        completion_index: usize,
    },
    #[error("line {line}: {field} out of range: {value}")]
    RangeViolation {
        line: usize,
        field: String,
        value: i64,
    },
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("nothing to write")]
    NothingToWrite,
    #[error("write failure: {0}")]
    SinkFailure(String),
}

impl IngestError {
    /// True for failures of the environment rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Self::Io(_) | Self::SinkFailure(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestWarning {
    pub line: usize,
    pub message: String,
}

/// Parsed records plus the repairs made along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested<T> {
    pub records: Vec<T>,
    pub warnings: Vec<IngestWarning>,
}

/// Corpus-level trace configuration and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub schema_version: String,
    pub k_completions: usize,
    pub k_topk: usize,
    pub temperature: f64,
    #[serde(default)]
    pub counts: BTreeMap<String, usize>,
    #[serde(default)]
    pub content_digest: BTreeMap<String, String>,
}

impl Default for CorpusManifest {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            k_completions: DEFAULT_K_COMPLETIONS,
            k_topk: DEFAULT_K_TOPK,
            temperature: DEFAULT_TEMPERATURE,
            counts: BTreeMap::new(),
            content_digest: BTreeMap::new(),
        }
    }
}

impl CorpusManifest {
    pub fn check(&self) -> Result<(), IngestError> {
        if self.k_topk < 1 {
            return Err(IngestError::InvalidManifest("k_topk must be >= 1".into()));
        }
        if self.k_completions < 1 {
            return Err(IngestError::InvalidManifest(
                "k_completions must be >= 1".into(),
            ));
        }
        if self.temperature.is_nan() || self.temperature <= 0.0 {
            return Err(IngestError::InvalidManifest(
                "temperature must be > 0".into(),
            ));
        }
        Ok(())
    }
}

pub fn read_manifest<R: BufRead>(mut reader: R) -> Result<CorpusManifest, IngestError> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| IngestError::Io(e.to_string()))?;
    let manifest: CorpusManifest =
        serde_json::from_str(&text).map_err(|e| IngestError::InvalidManifest(e.to_string()))?;
    manifest.check()?;
    Ok(manifest)
}

pub fn write_manifest<W: Write>(manifest: &CorpusManifest, mut sink: W) -> Result<(), IngestError> {
    let mut text = serde_json::to_string_pretty(manifest)
        .map_err(|e| IngestError::SinkFailure(e.to_string()))?;
    text.push('\n');
    sink.write_all(text.as_bytes())
        .map_err(|e| IngestError::SinkFailure(e.to_string()))
}

// ---------------------------------------------------------------------------
// Line plumbing
// ---------------------------------------------------------------------------

/// Yields `(line_number, object)` for every non-blank line.
fn json_lines<R: BufRead>(
    reader: R,
) -> impl Iterator<Item = Result<(usize, Map<String, Value>), IngestError>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let line_no = i + 1;
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(IngestError::Io(e.to_string()))),
        };
        let text = line.trim_end_matches('\r');
        if text.trim().is_empty() {
            return None;
        }
        Some(match serde_json::from_str::<Value>(text) {
            Ok(Value::Object(map)) => Ok((line_no, map)),
            Ok(_) => Err(malformed(line_no, "record is not a JSON object")),
            Err(e) => Err(malformed(line_no, format!("invalid JSON: {e}"))),
        })
    })
}

fn malformed(line: usize, reason: impl Into<String>) -> IngestError {
    IngestError::MalformedRecord {
        line,
        reason: reason.into(),
    }
}

fn field<'a>(
    obj: &'a Map<String, Value>,
    name: &str,
    line: usize,
) -> Result<&'a Value, IngestError> {
    obj.get(name)
        .ok_or_else(|| malformed(line, format!("missing field {name}")))
}

fn str_field(obj: &Map<String, Value>, name: &str, line: usize) -> Result<String, IngestError> {
    field(obj, name, line)?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| malformed(line, format!("field {name} must be a string")))
}

fn int_field(obj: &Map<String, Value>, name: &str, line: usize) -> Result<i64, IngestError> {
    field(obj, name, line)?
        .as_i64()
        .ok_or_else(|| malformed(line, format!("field {name} must be an integer")))
}

fn usize_field(obj: &Map<String, Value>, name: &str, line: usize) -> Result<usize, IngestError> {
    let v = int_field(obj, name, line)?;
    usize::try_from(v).map_err(|_| IngestError::RangeViolation {
        line,
        field: name.to_string(),
        value: v,
    })
}

/// Logprob value; strings such as `"-Infinity"` or `"NaN"` and `null` are
/// accepted as non-finite so they can be reported precisely.
fn logprob_value(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::Null => Some(f64::NAN),
        Value::String(s) => match s.as_str() {
            "NaN" | "nan" => Some(f64::NAN),
            "Infinity" | "inf" | "+Infinity" => Some(f64::INFINITY),
            "-Infinity" | "-inf" => Some(f64::NEG_INFINITY),
            _ => None,
        },
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Problems
// ---------------------------------------------------------------------------

pub fn read_problems<R: BufRead>(reader: R) -> Result<Ingested<Problem>, IngestError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for item in json_lines(reader) {
        let (line, obj) = item?;
        let id = str_field(&obj, "id", line)?;
        let question = str_field(&obj, "question", line)?;
        let reference_answer = str_field(&obj, "reference_answer", line)?;
        let source_tag = match obj.get("source_tag") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(malformed(line, "field source_tag must be a string")),
        };
        if id.is_empty() {
            return Err(malformed(line, "empty id"));
        }
        if question.trim().is_empty() {
            return Err(malformed(line, "empty question"));
        }
        if !seen.insert(id.clone()) {
            return Err(IngestError::DuplicateId { line, id });
        }
        records.push(Problem {
            id,
            question,
            reference_answer,
            source_tag,
        });
    }
    Ok(Ingested {
        records,
        warnings: Vec::new(),
    })
}

pub fn write_problems<'a, W, I>(problems: I, mut sink: W) -> Result<usize, IngestError>
where
    W: Write,
    I: IntoIterator<Item = &'a Problem>,
{
    let mut n = 0;
    for p in problems {
        write_json_line(&mut sink, p)?;
        n += 1;
    }
    sink.flush()
        .map_err(|e| IngestError::SinkFailure(e.to_string()))?;
    Ok(n)
}

fn write_json_line<W: Write, T: Serialize>(sink: &mut W, value: &T) -> Result<(), IngestError> {
    let mut line =
        serde_json::to_string(value).map_err(|e| IngestError::SinkFailure(e.to_string()))?;
    line.push('\n');
    sink.write_all(line.as_bytes())
        .map_err(|e| IngestError::SinkFailure(e.to_string()))
}

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

fn parse_token(
    v: &Value,
    line: usize,
    problem_id: &str,
    position: usize,
    k_topk: usize,
) -> Result<(TokenRecord, bool), IngestError> {
    let obj = v
        .as_object()
        .ok_or_else(|| malformed(line, format!("token {position} is not an object")))?;
    let chosen = logprob_value(field(obj, "chosen_logprob", line)?).ok_or_else(|| {
        malformed(
            line,
            format!("token {position}: chosen_logprob not a number"),
        )
    })?;
    let topk: Vec<f64> = field(obj, "topk_logprobs", line)?
        .as_array()
        .ok_or_else(|| {
            malformed(
                line,
                format!("token {position}: topk_logprobs not an array"),
            )
        })?
        .iter()
        .map(logprob_value)
        .collect::<Option<_>>()
        .ok_or_else(|| malformed(line, format!("token {position}: topk_logprobs not numeric")))?;
    let declared = usize_field(obj, "candidate_count", line)?;
    if topk.is_empty() || topk.len() > k_topk {
        return Err(IngestError::CandidateCountOutOfRange {
            line,
            problem_id: problem_id.to_string(),
            position,
            count: topk.len(),
            k: k_topk,
        });
    }
    TokenRecord::new(chosen, topk, declared).map_err(|e| {
        let problem_id = problem_id.to_string();
        match e {
            ModelError::NonFiniteLogprob { .. } => IngestError::NonFiniteLogprob {
                line,
                problem_id,
                position,
            },
            ModelError::PositiveLogprob { .. } => IngestError::PositiveLogprob {
                line,
                problem_id,
                position,
            },
            ModelError::CandidateCountMismatch { declared, actual } => {
                IngestError::CandidateCountMismatch {
                    line,
                    problem_id,
                    position,
                    declared,
                    actual,
                }
            }
            other => malformed(line, other.to_string()),
        }
    })
}

/// Reads traces and groups them into completion sets, ordered by first
/// appearance of each problem id and by completion index within a set.
/// Correctness is left unset.
pub fn read_traces<R: BufRead>(
    reader: R,
    manifest: &CorpusManifest,
) -> Result<Ingested<CompletionSet>, IngestError> {
    manifest.check()?;
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<GenerationTrace>> = HashMap::new();
    let mut seen: HashSet<(String, usize)> = HashSet::new();
    let mut warnings = Vec::new();

    for item in json_lines(reader) {
        let (line, obj) = item?;
        let problem_id = str_field(&obj, "problem_id", line)?;
        let completion_index = usize_field(&obj, "completion_index", line)?;
        let temperature = field(&obj, "temperature", line)?
            .as_f64()
            .ok_or_else(|| malformed(line, "field temperature must be a number"))?;
        let final_answer_text = match obj.get("final_answer_text") {
            None | Some(Value::Null) => String::new(),
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(malformed(line, "field final_answer_text must be a string")),
        };
        let raw_tokens = field(&obj, "tokens", line)?
            .as_array()
            .ok_or_else(|| malformed(line, "field tokens must be an array"))?;
        if raw_tokens.is_empty() {
            return Err(IngestError::EmptyTrace {
                line,
                problem_id,
                completion_index,
            });
        }
        let mut tokens = Vec::with_capacity(raw_tokens.len());
        for (position, raw) in raw_tokens.iter().enumerate() {
            let (token, repaired) = parse_token(raw, line, &problem_id, position, manifest.k_topk)?;
            if repaired {
                warnings.push(IngestWarning {
                    line,
                    message: format!(
                        "problem {problem_id} completion {completion_index} position {position}: \
                         top-k logprobs sorted"
                    ),
                });
            }
            tokens.push(token);
        }
        if (temperature - manifest.temperature).abs() > 1e-9 {
            warnings.push(IngestWarning {
                line,
                message: format!(
                    "problem {problem_id} completion {completion_index}: temperature \
                     {temperature} differs from manifest {}",
                    manifest.temperature
                ),
            });
        }
        if !seen.insert((problem_id.clone(), completion_index)) {
            return Err(IngestError::DuplicateCompletion {
                line,
                problem_id,
                completion_index,
            });
        }
        let trace = GenerationTrace::new(
            problem_id.clone(),
            completion_index,
            temperature,
            final_answer_text,
            tokens,
        )
        .map_err(|e| malformed(line, e.to_string()))?;
        groups
            .entry(problem_id.clone())
            .or_insert_with(|| {
                order.push(problem_id);
                Vec::new()
            })
            .push(trace);
    }

    let records = order
        .into_iter()
        .map(|problem_id| {
            let mut traces = groups.remove(&problem_id).unwrap_or_default();
            traces.sort_by_key(|t| t.completion_index);
            CompletionSet {
                problem_id,
                traces,
                correctness: None,
            }
        })
        .collect();
    Ok(Ingested { records, warnings })
}

/// Writes traces in set order, one line per completion.
pub fn write_traces<W: Write>(sets: &[CompletionSet], mut sink: W) -> Result<usize, IngestError> {
    let mut n = 0;
    for set in sets {
        for trace in &set.traces {
            write_json_line(&mut sink, trace)?;
            n += 1;
        }
    }
    sink.flush()
        .map_err(|e| IngestError::SinkFailure(e.to_string()))?;
    Ok(n)
}

// ---------------------------------------------------------------------------
// Annotations
// ---------------------------------------------------------------------------

pub fn read_annotations<R: BufRead>(reader: R) -> Result<Ingested<AnnotationRecord>, IngestError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for item in json_lines(reader) {
        let (line, obj) = item?;
        let problem_id = str_field(&obj, "problem_id", line)?;
        let rs = int_field(&obj, "rs", line)?;
        let sc = int_field(&obj, "sc", line)?;
        let cd = int_field(&obj, "cd", line)?;
        let range = |field: &str, value: i64| IngestError::RangeViolation {
            line,
            field: field.to_string(),
            value,
        };
        let rs = u32::try_from(rs).map_err(|_| range("rs", rs))?;
        if !(1..=5).contains(&sc) {
            return Err(range("sc", sc));
        }
        if !(1..=5).contains(&cd) {
            return Err(range("cd", cd));
        }
        if !seen.insert(problem_id.clone()) {
            return Err(IngestError::DuplicateId {
                line,
                id: problem_id,
            });
        }
        records.push(AnnotationRecord {
            problem_id,
            rs,
            sc: sc as u8,
            cd: cd as u8,
        });
    }
    Ok(Ingested {
        records,
        warnings: Vec::new(),
    })
}

pub fn write_annotations<W: Write>(
    annotations: &[AnnotationRecord],
    mut sink: W,
) -> Result<usize, IngestError> {
    for a in annotations {
        write_json_line(&mut sink, a)?;
    }
    sink.flush()
        .map_err(|e| IngestError::SinkFailure(e.to_string()))?;
    Ok(annotations.len())
}

// ---------------------------------------------------------------------------
// Scores
// ---------------------------------------------------------------------------

pub fn write_scores<W: Write>(scores: &[MetricVector], mut sink: W) -> Result<usize, IngestError> {
    if scores.is_empty() {
        return Err(IngestError::NothingToWrite);
    }
    for v in scores {
        write_json_line(&mut sink, v)?;
    }
    sink.flush()
        .map_err(|e| IngestError::SinkFailure(e.to_string()))?;
    Ok(scores.len())
}

pub fn read_scores<R: BufRead>(reader: R) -> Result<Ingested<MetricVector>, IngestError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for item in json_lines(reader) {
        let (line, obj) = item?;
        let v: MetricVector = serde_json::from_value(Value::Object(obj))
            .map_err(|e| malformed(line, e.to_string()))?;
        if let Some(issue) = v.invariant_issues().into_iter().next() {
            return Err(malformed(line, issue));
        }
        if !seen.insert(v.problem_id.clone()) {
            return Err(IngestError::DuplicateId {
                line,
                id: v.problem_id,
            });
        }
        records.push(v);
    }
    Ok(Ingested {
        records,
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest() -> CorpusManifest {
        CorpusManifest::default()
    }

    fn trace_line(tokens: &str) -> String {
        format!(
            r#"{{"problem_id":"p1","completion_index":0,"temperature":0.7,"final_answer_text":"4","tokens":[{tokens}]}}"#
        )
    }

    #[test]
    fn reads_two_problems() {
        let input = "{\"id\":\"p1\",\"question\":\"1+1?\",\"reference_answer\":\"2\"}\n\
                     {\"id\":\"p2\",\"question\":\"2+2?\",\"reference_answer\":\"4\",\"source_tag\":\"gsm8k\"}\n";
        let got = read_problems(input.as_bytes()).unwrap();
        assert_eq!(got.records.len(), 2);
        assert_eq!(got.records[1].source_tag.as_deref(), Some("gsm8k"));
    }

    #[test]
    fn missing_question_is_malformed_line_one() {
        let input = "{\"id\":\"p1\",\"reference_answer\":\"2\"}\n";
        assert_eq!(
            read_problems(input.as_bytes()),
            Err(IngestError::MalformedRecord {
                line: 1,
                reason: "missing field question".into()
            })
        );
    }

    #[test]
    fn duplicate_problem_id() {
        let input = "{\"id\":\"p7\",\"question\":\"a\",\"reference_answer\":\"1\"}\n\
                     {\"id\":\"p7\",\"question\":\"b\",\"reference_answer\":\"2\"}\n";
        assert!(matches!(
            read_problems(input.as_bytes()),
            Err(IngestError::DuplicateId { line: 2, id }) if id == "p7"
        ));
    }

    #[test]
    fn unsorted_topk_is_repaired_with_warning() {
        let line = trace_line(
            r#"{"chosen_logprob":-0.1,"topk_logprobs":[-0.2,-0.1],"candidate_count":2}"#,
        );
        let got = read_traces(line.as_bytes(), &manifest()).unwrap();
        let tok = &got.records[0].traces[0].tokens()[0];
        assert_eq!(tok.topk_logprobs(), &[-0.1, -0.2]);
        assert_eq!(got.warnings.len(), 1);
        assert_eq!(got.warnings[0].line, 1);
    }

    #[test]
    fn positive_and_non_finite_logprobs_rejected() {
        let line =
            trace_line(r#"{"chosen_logprob":0.3,"topk_logprobs":[-0.1],"candidate_count":1}"#);
        assert!(matches!(
            read_traces(line.as_bytes(), &manifest()),
            Err(IngestError::PositiveLogprob { position: 0, .. })
        ));
        let line = trace_line(concat!(
            r#"{"chosen_logprob":-0.1,"topk_logprobs":[-0.1],"candidate_count":1},"#,
            r#"{"chosen_logprob":-0.1,"topk_logprobs":[-0.1,"-Infinity"],"candidate_count":2}"#
        ));
        assert!(matches!(
            read_traces(line.as_bytes(), &manifest()),
            Err(IngestError::NonFiniteLogprob { position: 1, .. })
        ));
    }

    #[test]
    fn empty_trace_rejected() {
        let line = trace_line("");
        assert!(matches!(
            read_traces(line.as_bytes(), &manifest()),
            Err(IngestError::EmptyTrace {
                completion_index: 0,
                ..
            })
        ));
    }

    #[test]
    fn candidate_count_cross_checked() {
        let line = trace_line(
            r#"{"chosen_logprob":-0.1,"topk_logprobs":[-0.1,-0.5],"candidate_count":3}"#,
        );
        assert!(matches!(
            read_traces(line.as_bytes(), &manifest()),
            Err(IngestError::CandidateCountMismatch {
                declared: 3,
                actual: 2,
                ..
            })
        ));
        let six = r#"{"chosen_logprob":-0.1,"topk_logprobs":[-0.1,-0.2,-0.3,-0.4,-0.5,-0.6],"candidate_count":6}"#;
        assert!(matches!(
            read_traces(trace_line(six).as_bytes(), &manifest()),
            Err(IngestError::CandidateCountOutOfRange { count: 6, k: 5, .. })
        ));
    }

    #[test]
    fn traces_grouped_by_problem() {
        let tok = r#"{"chosen_logprob":-0.1,"topk_logprobs":[-0.1],"candidate_count":1}"#;
        let mut input = String::new();
        for (pid, idx) in [("b", 1), ("a", 0), ("b", 0)] {
            input.push_str(&format!(
                r#"{{"problem_id":"{pid}","completion_index":{idx},"temperature":0.7,"final_answer_text":"","tokens":[{tok}]}}"#
            ));
            input.push('\n');
        }
        let got = read_traces(input.as_bytes(), &manifest()).unwrap();
        let ids: Vec<_> = got.records.iter().map(|s| s.problem_id.as_str()).collect();
        assert_eq!(ids, ["b", "a"]);
        let idx: Vec<_> = got.records[0]
            .traces
            .iter()
            .map(|t| t.completion_index)
            .collect();
        assert_eq!(idx, [0, 1]);
    }

    #[test]
    fn annotation_ranges() {
        let ok = r#"{"problem_id":"p1","rs":4,"sc":2,"cd":3}"#;
        let got = read_annotations(ok.as_bytes()).unwrap();
        assert_eq!(
            got.records,
            [AnnotationRecord {
                problem_id: "p1".into(),
                rs: 4,
                sc: 2,
                cd: 3
            }]
        );
        let bad_sc = r#"{"problem_id":"p1","rs":4,"sc":0,"cd":3}"#;
        assert!(matches!(
            read_annotations(bad_sc.as_bytes()),
            Err(IngestError::RangeViolation { ref field, value: 0, .. }) if field == "sc"
        ));
        let bad_rs = r#"{"problem_id":"p1","rs":-1,"sc":1,"cd":3}"#;
        assert!(matches!(
            read_annotations(bad_rs.as_bytes()),
            Err(IngestError::RangeViolation { ref field, value: -1, .. }) if field == "rs"
        ));
    }

    #[test]
    fn scores_write_nulls_and_round_trip() {
        let mut v = MetricVector::empty("p1");
        v.acc = Some(0.35);
        v.vacc = Some(0.35 * 0.65);
        let mut out = Vec::new();
        assert_eq!(write_scores(&[v.clone()], &mut out).unwrap(), 1);
        let text = String::from_utf8(out.clone()).unwrap();
        assert!(text.starts_with(r#"{"problem_id":"p1","slp":null,"tlp":null,"lg":null"#));
        let back = read_scores(out.as_slice()).unwrap();
        assert_eq!(back.records, [v]);
        assert_eq!(
            write_scores(&[], Vec::new()),
            Err(IngestError::NothingToWrite)
        );
    }

    #[test]
    fn manifest_checks() {
        let mut m = manifest();
        assert!(m.check().is_ok());
        m.k_topk = 0;
        assert!(m.check().is_err());
        let mut out = Vec::new();
        write_manifest(&manifest(), &mut out).unwrap();
        assert_eq!(read_manifest(out.as_slice()).unwrap(), manifest());
    }

    #[test]
    fn blank_lines_skipped_but_line_numbers_kept() {
        let input =
            "\n{\"id\":\"p1\",\"question\":\"q\",\"reference_answer\":\"1\"}\n\n{\"id\":1}\n";
        assert!(matches!(
            read_problems(input.as_bytes()),
            Err(IngestError::MalformedRecord { line: 4, .. })
        ));
    }
}
