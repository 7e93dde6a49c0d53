//! Accuracy over sampled completions, its Bernoulli variance, and assembly
//! of complete per-problem score vectors.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{AnnotationRecord, CompletionSet, Metric, MetricVector, Provenance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OutcomeError {
    #[error("correctness flags are not set for problem {0}")]
    CorrectnessUnset(String),
    #[error("problem {0} has no completions")]
    NoCompletions(String),
    #[error("problem {0} has no metric source")]
    NoMetricSource(String),
}

fn flags(set: &CompletionSet) -> Result<&[bool], OutcomeError> {
    let flags = set
        .correctness
        .as_deref()
        .ok_or_else(|| OutcomeError::CorrectnessUnset(set.problem_id.clone()))?;
    if flags.is_empty() {
        return Err(OutcomeError::NoCompletions(set.problem_id.clone()));
    }
    Ok(flags)
}

/// Fraction of completions judged correct.
pub fn acc(set: &CompletionSet) -> Result<f64, OutcomeError> {
    let flags = flags(set)?;
    let correct = flags.iter().filter(|&&z| z).count();
    Ok(correct as f64 / flags.len() as f64)
}

/// `p(1 - p)` from the accuracy; equal to the mean squared deviation of
/// the correctness indicators.
pub fn vacc(set: &CompletionSet) -> Result<f64, OutcomeError> {
    let p = acc(set)?;
    Ok(p * (1.0 - p))
}

/// Builds the score vector for one problem from whichever sources exist.
///
/// `model_side` carries already-aggregated model-side values with their
/// provenance. `set`, when given, must be judged; accuracy and variance are
/// filled together. `judge_warnings` are attached to both.
pub fn assemble(
    problem_id: &str,
    model_side: &BTreeMap<Metric, (Option<f64>, Provenance)>,
    set: Option<(&CompletionSet, &[String])>,
    annotation: Option<&AnnotationRecord>,
) -> Result<MetricVector, OutcomeError> {
    if model_side.is_empty() && set.is_none() && annotation.is_none() {
        return Err(OutcomeError::NoMetricSource(problem_id.to_string()));
    }
    let mut v = MetricVector::empty(problem_id);
    for (&metric, (value, provenance)) in model_side {
        if metric.is_model_side() {
            v.set_model_side(metric, *value);
            v.provenance
                .insert(metric.name().to_string(), provenance.clone());
        }
    }
    if let Some((set, warnings)) = set {
        let p = acc(set)?;
        v.acc = Some(p);
        v.vacc = Some(p * (1.0 - p));
        let provenance = Provenance {
            n_completions_used: set.k(),
            warnings: warnings.to_vec(),
        };
        v.provenance.insert("acc".into(), provenance.clone());
        v.provenance.insert("vacc".into(), provenance);
    }
    if let Some(a) = annotation {
        v.rs = Some(a.rs);
        v.sc = Some(a.sc);
        v.cd = Some(a.cd);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GenerationTrace, TokenRecord};

    fn judged(flags: &[bool]) -> CompletionSet {
        let (tok, _) = TokenRecord::new(-0.5, vec![-0.5], 1).unwrap();
        CompletionSet {
            problem_id: "p".into(),
            traces: (0..flags.len())
                .map(|i| GenerationTrace::new("p", i, 0.7, "x", vec![tok.clone()]).unwrap())
                .collect(),
            correctness: Some(flags.to_vec()),
        }
    }

    fn pattern(k: usize, correct: usize) -> Vec<bool> {
        (0..k).map(|i| i < correct).collect()
    }

    #[test]
    fn acc_counts() {
        assert_eq!(acc(&judged(&pattern(20, 15))).unwrap(), 0.75);
        assert_eq!(acc(&judged(&pattern(20, 0))).unwrap(), 0.0);
        assert_eq!(acc(&judged(&pattern(20, 20))).unwrap(), 1.0);
    }

    #[test]
    fn vacc_values() {
        assert_eq!(vacc(&judged(&pattern(2, 1))).unwrap(), 0.25);
        assert_eq!(vacc(&judged(&pattern(5, 0))).unwrap(), 0.0);
        assert_eq!(vacc(&judged(&pattern(5, 5))).unwrap(), 0.0);
        let v = vacc(&judged(&pattern(20, 7))).unwrap();
        assert!((v - 0.2275).abs() < 1e-15);
        // Deviation form, written out.
        let p = 7.0 / 20.0;
        let dev: f64 = pattern(20, 7)
            .iter()
            .map(|&z| (f64::from(u8::from(z)) - p).powi(2))
            .sum::<f64>()
            / 20.0;
        assert!((v - dev).abs() < 1e-15);
    }

    #[test]
    fn unset_correctness_is_an_error() {
        let mut s = judged(&pattern(3, 1));
        s.correctness = None;
        assert_eq!(acc(&s), Err(OutcomeError::CorrectnessUnset("p".into())));
        assert!(vacc(&s).is_err());
    }

    #[test]
    fn acc_is_permutation_invariant() {
        let a = acc(&judged(&[true, false, false, true, true])).unwrap();
        let b = acc(&judged(&[false, true, true, false, true])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn assemble_sources() {
        let mut model = BTreeMap::new();
        model.insert(Metric::Slp, (Some(1.5), Provenance::default()));
        let v = assemble("p", &model, None, None).unwrap();
        assert_eq!(v.slp, Some(1.5));
        assert!(v.acc.is_none() && v.vacc.is_none() && v.rs.is_none());

        let ann = AnnotationRecord {
            problem_id: "p".into(),
            rs: 4,
            sc: 2,
            cd: 3,
        };
        let v = assemble("p", &BTreeMap::new(), None, Some(&ann)).unwrap();
        assert_eq!((v.rs, v.sc, v.cd), (Some(4), Some(2), Some(3)));
        assert!(v.slp.is_none() && v.acc.is_none());

        let mut model = BTreeMap::new();
        for m in Metric::MODEL_SIDE {
            model.insert(m, (Some(1.0), Provenance::default()));
        }
        let set = judged(&pattern(4, 1));
        let v = assemble("p", &model, Some((&set, &[])), Some(&ann)).unwrap();
        assert!(Metric::ALL.iter().all(|&m| v.get(m).is_some()));
        assert!(v.invariant_issues().is_empty());

        assert_eq!(
            assemble("p", &BTreeMap::new(), None, None),
            Err(OutcomeError::NoMetricSource("p".into()))
        );
    }
}
