//! Rule-based final-answer normalisation and equivalence.
//!
//! Answers are stripped of presentation wrappers (`\boxed{}`, `$…$`, `\(…\)`,
//! `\[…\]`, trailing periods), lowercased, and parsed as exact rationals when
//! they look like integers, decimals, `a/b` fractions, `\frac{a}{b}`, or
//! percentages. Numeric answers compare exactly unless a decimal literal is
//! involved, in which case an absolute tolerance of `1e-6` applies.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::model::{CompletionSet, Problem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnswerError {
    #[error("answer is empty")]
    EmptyAnswer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnswerKind {
    Numeric,
    SymbolicText,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedAnswer {
    pub canonical_text: String,
    pub numeric_value: Option<BigRational>,
    pub kind: AnswerKind,
    /// The value came from a decimal literal and is compared with tolerance.
    pub from_decimal: bool,
}

/// Absolute tolerance used when either side is a decimal literal.
pub fn decimal_tolerance() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(1_000_000))
}

pub fn normalize(raw: &str) -> Result<NormalizedAnswer, AnswerError> {
    let text = clean(raw);
    if text.is_empty() {
        return Err(AnswerError::EmptyAnswer);
    }
    Ok(match parse_number(&text) {
        Some((value, from_decimal)) => NormalizedAnswer {
            canonical_text: canonical_number(&value, from_decimal),
            numeric_value: Some(value),
            kind: AnswerKind::Numeric,
            from_decimal,
        },
        None => NormalizedAnswer {
            canonical_text: text,
            numeric_value: None,
            kind: AnswerKind::SymbolicText,
            from_decimal: false,
        },
    })
}

pub fn equivalent(a: &NormalizedAnswer, b: &NormalizedAnswer) -> bool {
    match (&a.numeric_value, &b.numeric_value) {
        (Some(x), Some(y)) => {
            if a.from_decimal || b.from_decimal {
                (x - y).abs() <= decimal_tolerance()
            } else {
                x == y
            }
        }
        (None, None) => a.canonical_text == b.canonical_text,
        _ => false,
    }
}

/// Fills `correctness` for every trace by comparing its final answer with
/// the problem's reference. Answers that cannot be normalised are judged
/// incorrect and produce a warning.
pub fn judge_set(set: &CompletionSet, reference: &Problem) -> (CompletionSet, Vec<String>) {
    let mut warnings = Vec::new();
    let reference_answer = normalize(&reference.reference_answer);
    if reference_answer.is_err() {
        warnings.push(format!(
            "reference answer of {} is empty; all completions judged incorrect",
            reference.id
        ));
    }
    let flags = set
        .traces
        .iter()
        .map(|trace| {
            let Ok(expected) = &reference_answer else {
                return false;
            };
            match normalize(&trace.final_answer_text) {
                Ok(answer) => equivalent(&answer, expected),
                Err(_) => {
                    warnings.push(format!(
                        "completion {}: empty answer judged incorrect",
                        trace.completion_index
                    ));
                    false
                }
            }
        })
        .collect();
    let mut judged = set.clone();
    judged.correctness = Some(flags);
    (judged, warnings)
}

// ---------------------------------------------------------------------------

fn clean(raw: &str) -> String {
    let mut current = raw.to_string();
    loop {
        let next = strip_once(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

fn strip_once(s: &str) -> String {
    let s = s.trim();
    if let Some(inner) = last_braced(s, &["\\boxed{", "\\fbox{"]) {
        return inner;
    }
    for (open, close) in [("$$", "$$"), ("$", "$"), ("\\(", "\\)"), ("\\[", "\\]")] {
        if s.len() >= open.len() + close.len() {
            if let Some(inner) = s.strip_prefix(open).and_then(|r| r.strip_suffix(close)) {
                return inner.to_string();
            }
        }
    }
    let trimmed = s.trim_end_matches('.');
    if trimmed.len() != s.len() {
        return trimmed.to_string();
    }
    s.to_string()
}

/// Content of the last `\boxed{…}` (brace-balanced), if any.
fn last_braced(s: &str, openers: &[&str]) -> Option<String> {
    let (start, opener) = openers
        .iter()
        .filter_map(|o| s.rfind(o).map(|i| (i, *o)))
        .max_by_key(|(i, _)| *i)?;
    let body_start = start + opener.len();
    let mut depth = 1usize;
    for (offset, c) in s[body_start..].char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(s[body_start..body_start + offset].to_string());
                }
            }
            _ => {}
        }
    }
    None
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Removes `1,234,567` style separators; other comma uses stay untouched.
fn drop_thousands_separators(s: &str) -> Option<String> {
    if !s.contains(',') {
        return Some(s.to_string());
    }
    let (int_part, frac) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    let mut groups = int_part.split(',');
    let head = groups.next()?;
    if !is_digits(head) || head.len() > 3 {
        return None;
    }
    let mut out = head.to_string();
    for g in groups {
        if g.len() != 3 || !is_digits(g) {
            return None;
        }
        out.push_str(g);
    }
    if let Some(f) = frac {
        out.push('.');
        out.push_str(f);
    }
    Some(out)
}

/// Unsigned integer or decimal literal. Returns the value and whether a
/// decimal point was present.
fn parse_unsigned(s: &str) -> Option<(BigRational, bool)> {
    let s = drop_thousands_separators(s)?;
    match s.split_once('.') {
        None => {
            if !is_digits(&s) {
                return None;
            }
            Some((BigRational::from_integer(s.parse().ok()?), false))
        }
        Some((int_part, frac)) => {
            if (int_part.is_empty() && frac.is_empty())
                || !(int_part.is_empty() || is_digits(int_part))
                || !(frac.is_empty() || is_digits(frac))
            {
                return None;
            }
            let digits = format!("{int_part}{frac}");
            let numer: BigInt = if digits.is_empty() {
                BigInt::zero()
            } else {
                digits.parse().ok()?
            };
            let denom = num_traits::pow(BigInt::from(10), frac.len());
            Some((BigRational::new(numer, denom), true))
        }
    }
}

fn split_sign(s: &str) -> (bool, &str) {
    if let Some(rest) = s.strip_prefix('-') {
        (true, rest.trim_start())
    } else if let Some(rest) = s.strip_prefix('+') {
        (false, rest.trim_start())
    } else {
        (false, s)
    }
}

fn parse_frac_command(s: &str) -> Option<(BigRational, bool)> {
    let rest = ["\\dfrac", "\\tfrac", "\\frac"]
        .iter()
        .find_map(|p| s.strip_prefix(p))?;
    let rest = rest.strip_prefix('{')?;
    let (num, rest) = rest.split_once('}')?;
    let rest = rest.strip_prefix('{')?;
    let den = rest.strip_suffix('}')?;
    if den.contains('}') || num.contains('{') || den.contains('{') {
        return None;
    }
    ratio(num.trim(), den.trim())
}

fn ratio(num: &str, den: &str) -> Option<(BigRational, bool)> {
    let (neg_n, num) = split_sign(num);
    let (neg_d, den) = split_sign(den);
    let (n, n_dec) = parse_unsigned(num)?;
    let (d, d_dec) = parse_unsigned(den)?;
    if n_dec || d_dec || d.is_zero() {
        return None;
    }
    let v = n / d;
    Some((if neg_n != neg_d { -v } else { v }, false))
}

fn parse_number(text: &str) -> Option<(BigRational, bool)> {
    let s: String = text.replace('\u{2212}', "-");
    let s = s.trim();
    let (percent, s) = if let Some(r) = s.strip_suffix("\\%") {
        (true, r.trim_end())
    } else if let Some(r) = s.strip_suffix('%') {
        (true, r.trim_end())
    } else {
        (false, s)
    };
    let (negative, body) = split_sign(s);
    let (value, from_decimal) = if let Some(v) = parse_frac_command(body) {
        v
    } else if let Some((n, d)) = body.split_once('/') {
        ratio(n.trim(), d.trim())?
    } else {
        parse_unsigned(body)?
    };
    let value = if negative { -value } else { value };
    let value = if percent {
        value / BigRational::from_integer(BigInt::from(100))
    } else {
        value
    };
    Some((value, from_decimal))
}

fn canonical_number(value: &BigRational, from_decimal: bool) -> String {
    if from_decimal {
        decimal_expansion(value)
    } else if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Exact decimal string of a rational whose denominator divides a power of
/// ten. Always carries at least one fractional digit.
fn decimal_expansion(value: &BigRational) -> String {
    let ten = BigInt::from(10);
    let mut scale = 0usize;
    let mut scaled = value.clone();
    while scale == 0 || !scaled.is_integer() {
        scaled *= BigRational::from_integer(ten.clone());
        scale += 1;
    }
    let negative = scaled.is_negative();
    let digits = scaled.numer().abs().to_string();
    let scale = scale.max(1);
    let padded = format!("{digits:0>width$}", width = scale + 1);
    let (int_part, frac) = padded.split_at(padded.len() - scale);
    let sign = if negative { "-" } else { "" };
    format!("{sign}{int_part}.{frac}")
}
