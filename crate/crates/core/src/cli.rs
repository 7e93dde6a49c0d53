//! Batch command surface: `validate`, `score`, `tier`, `order`, `report`.
//!
//! Every command reads plain files and writes into `--out`. Exit codes are
//! 0 on success, 1 for data problems, 2 for environment or I/O failures.
//! Internal parallelism is capped by `CURRIKIT_THREADS`; outputs do not
//! depend on it.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::answer;
use crate::curriculum::{self, EmitOptions};
use crate::digest::sha256_hex;
use crate::ingest::{self, CorpusManifest, IngestError, IngestWarning};
use crate::metrics;
use crate::model::{
    self, AnnotationRecord, CompletionSet, Metric, MetricVector, Problem, Provenance, Strategy,
    Tier, TierRule, ValidationConfig,
};
use crate::outcome;
use crate::prng::{self, PRNG_NAME};
use crate::sum;

pub const THREADS_ENV: &str = "CURRIKIT_THREADS";

const POLARITY_HELP: &str = "\
Plans sort by raw metric value: fcl ascending, rcl descending.
Metric polarity (what a larger value means):
  slp, tlp, sle, tle   more surprisal / uncertainty (harder)
  rs, sc, cd           more steps / symbols / comprehension load (harder)
  acc                  more completions correct (easier)
  lg                   larger top-1 margin, more confident (easier)
  vacc                 less stable outcomes (peaks at 50% accuracy)";

#[derive(Debug, Parser)]
#[command(name = "currikit", version, about = "Difficulty scoring and curriculum ordering", after_help = POLARITY_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check problems, traces and annotations for consistency.
    Validate(RunConfig),
    /// Compute per-problem metrics into scores.jsonl.
    Score(RunConfig),
    /// Split scored problems into low/medium/high tiers.
    Tier(RunConfig),
    /// Build a curriculum plan and the reordered training file.
    Order(RunConfig),
    /// Seeded-sample average of each metric.
    Report(RunConfig),
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    #[arg(long)]
    pub problems: Option<PathBuf>,
    #[arg(long)]
    pub traces: Option<PathBuf>,
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Defaults to <out>/scores.jsonl.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated metric names. `order` and `tier` use the first.
    #[arg(long, value_delimiter = ',')]
    pub metrics: Vec<String>,
    /// fcl, rcl, sgc, gfc, grc or shuf.
    #[arg(long)]
    pub strategy: Option<String>,
    /// low, medium or high (sgc only).
    #[arg(long)]
    pub tier: Option<String>,
    /// equal or quantile.
    #[arg(long, default_value = "equal")]
    pub tier_rule: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Completions per problem.
    #[arg(long, default_value_t = model::DEFAULT_K_COMPLETIONS)]
    pub k: usize,
    /// Candidates kept per token position.
    #[arg(long, default_value_t = model::DEFAULT_K_TOPK)]
    pub topk: usize,
    #[arg(long, default_value_t = model::DEFAULT_TEMPERATURE)]
    pub temperature: f64,
    #[arg(long, default_value_t = 200)]
    pub sample_size: usize,
    /// Verbatim passes over the ordering in ordered_train.jsonl.
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    /// Downgrade K mismatches to warnings.
    #[arg(long)]
    pub permissive: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Environment(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Environment(_) => 2,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        if e.is_io() {
            CliError::Environment(e.to_string())
        } else {
            CliError::Domain(e.to_string())
        }
    }
}

fn domain(msg: impl Into<String>) -> CliError {
    CliError::Domain(msg.into())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let threads = thread_cap()?;
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        builder
            .build()
            .map_err(|e| CliError::Environment(format!("thread pool: {e}")))?
    };
    pool.install(|| match cli.command {
        Command::Validate(cfg) => cmd_validate(&cfg),
        Command::Score(cfg) => cmd_score(&cfg),
        Command::Tier(cfg) => cmd_tier(&cfg),
        Command::Order(cfg) => cmd_order(&cfg),
        Command::Report(cfg) => cmd_report(&cfg),
    })
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Environment(format!(
                "{THREADS_ENV} must be a positive integer, got '{v}'"
            ))),
        },
    }
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Environment(format!("{}: {e}", path.display())))
}

fn write_out(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Environment(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, bytes)
        .map_err(|e| CliError::Environment(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text.into_bytes()
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str, cmd: &str) -> Result<&'a Path, CliError> {
    path.as_deref()
        .ok_or_else(|| domain(format!("{cmd} requires --{flag}")))
}

fn manifest_from(cfg: &RunConfig) -> Result<CorpusManifest, CliError> {
    let manifest = CorpusManifest {
        k_completions: cfg.k,
        k_topk: cfg.topk,
        temperature: cfg.temperature,
        ..CorpusManifest::default()
    };
    manifest.check()?;
    Ok(manifest)
}

fn scores_path(cfg: &RunConfig) -> PathBuf {
    cfg.scores
        .clone()
        .unwrap_or_else(|| cfg.out.join("scores.jsonl"))
}

fn parse_metrics(cfg: &RunConfig) -> Result<Vec<Metric>, CliError> {
    let mut out = Vec::new();
    for name in cfg.metrics.iter().filter(|s| !s.trim().is_empty()) {
        let m: Metric = name
            .parse()
            .map_err(|e: model::UnknownMetric| domain(e.to_string()))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

fn single_metric(cfg: &RunConfig, cmd: &str) -> Result<Metric, CliError> {
    parse_metrics(cfg)?
        .into_iter()
        .next()
        .ok_or_else(|| domain(format!("{cmd} requires --metrics <name>")))
}

pub fn parse_strategy(s: &str) -> Result<Strategy, CliError> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "fcl" => Strategy::Fcl,
        "rcl" => Strategy::Rcl,
        "sgc" => Strategy::Sgc,
        "gfc" => Strategy::Gfc,
        "grc" => Strategy::Grc,
        "shuf" => Strategy::Shuf,
        _ => return Err(domain(format!("unknown strategy '{s}'"))),
    })
}

pub fn parse_tier(s: &str) -> Result<Tier, CliError> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "low" => Tier::Low,
        "medium" => Tier::Medium,
        "high" => Tier::High,
        _ => return Err(domain(format!("unknown tier '{s}'"))),
    })
}

pub fn parse_tier_rule(s: &str) -> Result<TierRule, CliError> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "equal" | "equal_count" => TierRule::EqualCount,
        "quantile" => TierRule::Quantile,
        _ => return Err(domain(format!("unknown tier rule '{s}'"))),
    })
}

struct Corpus {
    problems: Vec<Problem>,
    sets: Option<Vec<CompletionSet>>,
    annotations: Option<Vec<AnnotationRecord>>,
    warnings: Vec<IngestWarning>,
    digests: BTreeMap<String, String>,
}

fn load_corpus(cfg: &RunConfig, cmd: &str) -> Result<Corpus, CliError> {
    let manifest = manifest_from(cfg)?;
    let mut digests = BTreeMap::new();
    let mut warnings = Vec::new();

    let bytes = read_bytes(require(&cfg.problems, "problems", cmd)?)?;
    digests.insert("problems".to_string(), sha256_hex(&bytes));
    let problems = ingest::read_problems(bytes.as_slice())?.records;

    let sets = match &cfg.traces {
        None => None,
        Some(path) => {
            let bytes = read_bytes(path)?;
            digests.insert("traces".to_string(), sha256_hex(&bytes));
            let got = ingest::read_traces(bytes.as_slice(), &manifest)?;
            warnings.extend(got.warnings);
            Some(got.records)
        }
    };
    let annotations = match &cfg.annotations {
        None => None,
        Some(path) => {
            let bytes = read_bytes(path)?;
            digests.insert("annotations".to_string(), sha256_hex(&bytes));
            Some(ingest::read_annotations(bytes.as_slice())?.records)
        }
    };
    Ok(Corpus {
        problems,
        sets,
        annotations,
        warnings,
        digests,
    })
}

fn validation_config(cfg: &RunConfig) -> ValidationConfig {
    ValidationConfig {
        k_completions: cfg.k,
        k_topk: cfg.topk,
        permissive: cfg.permissive,
    }
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct ValidationOutput {
    clean: bool,
    violations: usize,
    warnings: usize,
    entries: Vec<model::ReportEntry>,
    ingest_warnings: Vec<IngestWarning>,
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<(), CliError> {
    let output = match load_corpus(cfg, "validate") {
        Ok(corpus) => {
            let report = model::validate_corpus(
                &corpus.problems,
                corpus.sets.as_deref(),
                corpus.annotations.as_deref(),
                &validation_config(cfg),
            );
            ValidationOutput {
                clean: report.is_clean(),
                violations: report.violations().count(),
                warnings: report.warnings().count(),
                entries: report.entries,
                ingest_warnings: corpus.warnings,
            }
        }
        Err(CliError::Domain(msg)) => ValidationOutput {
            clean: false,
            violations: 1,
            warnings: 0,
            entries: vec![model::ReportEntry {
                problem_id: String::new(),
                severity: model::Severity::Violation,
                message: msg,
            }],
            ingest_warnings: Vec::new(),
        },
        Err(e) => return Err(e),
    };
    write_out(&cfg.out, "validation_report.json", &pretty(&output))?;
    if output.clean {
        Ok(())
    } else {
        let first: Vec<String> = output
            .entries
            .iter()
            .filter(|e| e.severity == model::Severity::Violation)
            .take(5)
            .map(|e| format!("{}: {}", e.problem_id, e.message))
            .collect();
        Err(domain(format!(
            "{} violation(s): {}",
            output.violations,
            first.join("; ")
        )))
    }
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

fn select_metrics(cfg: &RunConfig, corpus: &Corpus) -> Result<Vec<Metric>, CliError> {
    let requested = parse_metrics(cfg)?;
    let has_traces = corpus.sets.is_some();
    let has_annotations = corpus.annotations.is_some();
    if requested.is_empty() {
        let defaults: Vec<Metric> = Metric::ALL
            .into_iter()
            .filter(|m| {
                (m.needs_traces() && has_traces) || (m.needs_annotations() && has_annotations)
            })
            .collect();
        if defaults.is_empty() {
            return Err(domain(
                "MissingMetricSource: score needs --traces and/or --annotations",
            ));
        }
        return Ok(defaults);
    }
    for m in &requested {
        if m.needs_traces() && !has_traces {
            let what = if m.is_model_side() {
                "token logprobs"
            } else {
                "completion final answers"
            };
            return Err(domain(format!(
                "MissingMetricSource: metric {m} needs {what} from --traces"
            )));
        }
        if m.needs_annotations() && !has_annotations {
            return Err(domain(format!(
                "MissingMetricSource: metric {m} needs --annotations"
            )));
        }
    }
    Ok(requested)
}

/// Scores one problem. Pure; safe to run on any worker.
pub fn score_problem(
    problem: &Problem,
    set: Option<&CompletionSet>,
    annotation: Option<&AnnotationRecord>,
    selected: &[Metric],
    k: usize,
) -> Result<MetricVector, CliError> {
    let mut model_side: BTreeMap<Metric, (Option<f64>, Provenance)> = BTreeMap::new();
    let mut judged = None;
    if let Some(set) = set {
        for &m in selected.iter().filter(|m| m.is_model_side()) {
            let per_trace: Vec<Option<f64>> = set
                .traces
                .iter()
                .map(|t| metrics::trace_metric(t, m))
                .collect();
            let agg = metrics::aggregate(&per_trace, k);
            model_side.insert(m, (agg.value, agg.provenance));
        }
        if selected
            .iter()
            .any(|m| matches!(m, Metric::Acc | Metric::Vacc))
        {
            judged = Some(answer::judge_set(set, problem));
        }
    }
    let annotation = annotation.filter(|_| selected.iter().any(|m| m.needs_annotations()));
    let mut v = outcome::assemble(
        &problem.id,
        &model_side,
        judged.as_ref().map(|(s, w)| (s, w.as_slice())),
        annotation,
    )
    .map_err(|e| domain(e.to_string()))?;
    if !selected.contains(&Metric::Rs) {
        v.rs = None;
    }
    if !selected.contains(&Metric::Sc) {
        v.sc = None;
    }
    if !selected.contains(&Metric::Cd) {
        v.cd = None;
    }
    Ok(v)
}

pub fn cmd_score(cfg: &RunConfig) -> Result<(), CliError> {
    let corpus = load_corpus(cfg, "score")?;
    let selected = select_metrics(cfg, &corpus)?;
    let report = model::validate_corpus(
        &corpus.problems,
        corpus.sets.as_deref(),
        corpus.annotations.as_deref(),
        &validation_config(cfg),
    );
    if let Some(first) = report.violations().next() {
        return Err(domain(format!(
            "inputs failed validation ({} violation(s)); first: {}: {}",
            report.violations().count(),
            first.problem_id,
            first.message
        )));
    }

    let sets: HashMap<&str, &CompletionSet> = corpus
        .sets
        .iter()
        .flatten()
        .map(|s| (s.problem_id.as_str(), s))
        .collect();
    let annotations: HashMap<&str, &AnnotationRecord> = corpus
        .annotations
        .iter()
        .flatten()
        .map(|a| (a.problem_id.as_str(), a))
        .collect();

    let scores: Vec<MetricVector> = corpus
        .problems
        .par_iter()
        .map(|p| {
            score_problem(
                p,
                sets.get(p.id.as_str()).copied(),
                annotations.get(p.id.as_str()).copied(),
                &selected,
                cfg.k,
            )
        })
        .collect::<Result<_, _>>()?;

    let mut scores_bytes = Vec::new();
    ingest::write_scores(&scores, &mut scores_bytes)?;

    let mut manifest = manifest_from(cfg)?;
    manifest
        .counts
        .insert("problems".into(), corpus.problems.len());
    if let Some(sets) = &corpus.sets {
        manifest
            .counts
            .insert("traces".into(), sets.iter().map(CompletionSet::k).sum());
    }
    if let Some(a) = &corpus.annotations {
        manifest.counts.insert("annotations".into(), a.len());
    }
    manifest.counts.insert("scores".into(), scores.len());
    manifest.content_digest = corpus.digests;
    manifest
        .content_digest
        .insert("scores".into(), sha256_hex(&scores_bytes));
    let mut manifest_bytes = Vec::new();
    ingest::write_manifest(&manifest, &mut manifest_bytes)?;

    write_out(&cfg.out, "scores.jsonl", &scores_bytes)?;
    write_out(&cfg.out, "manifest.json", &manifest_bytes)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// tier / order
// ---------------------------------------------------------------------------

fn load_scores(cfg: &RunConfig) -> Result<(Vec<MetricVector>, String), CliError> {
    let bytes = read_bytes(&scores_path(cfg))?;
    let digest = sha256_hex(&bytes);
    Ok((ingest::read_scores(bytes.as_slice())?.records, digest))
}

fn curriculum_err(e: curriculum::CurriculumError) -> CliError {
    match e {
        curriculum::CurriculumError::SinkFailure(msg) => CliError::Environment(msg),
        other => domain(other.to_string()),
    }
}

pub fn cmd_tier(cfg: &RunConfig) -> Result<(), CliError> {
    let metric = single_metric(cfg, "tier")?;
    let rule = parse_tier_rule(&cfg.tier_rule)?;
    let (scores, _) = load_scores(cfg)?;
    let partition = curriculum::partition_tiers(&scores, metric, rule).map_err(curriculum_err)?;
    write_out(&cfg.out, "tiers.json", &pretty(&partition))?;
    Ok(())
}

pub fn cmd_order(cfg: &RunConfig) -> Result<(), CliError> {
    let strategy = parse_strategy(
        cfg.strategy
            .as_deref()
            .ok_or_else(|| domain("order requires --strategy"))?,
    )?;
    let metric = if strategy.needs_metric() {
        Some(single_metric(cfg, "order")?)
    } else {
        None
    };
    let rule = parse_tier_rule(&cfg.tier_rule)?;

    let problem_bytes = read_bytes(require(&cfg.problems, "problems", "order")?)?;
    let problems = ingest::read_problems(problem_bytes.as_slice())?.records;
    let (scores, scores_digest) = load_scores(cfg)?;

    let partition = |m| curriculum::partition_tiers(&scores, m, rule).map_err(curriculum_err);
    let plan = match (strategy, metric) {
        (Strategy::Shuf, _) => {
            let ids: Vec<String> = scores.iter().map(|v| v.problem_id.clone()).collect();
            curriculum::order_shuf(&ids, cfg.seed)
        }
        (Strategy::Fcl, Some(m)) => curriculum::order_fcl(&scores, m).map_err(curriculum_err)?,
        (Strategy::Rcl, Some(m)) => curriculum::order_rcl(&scores, m).map_err(curriculum_err)?,
        (Strategy::Sgc, Some(m)) => {
            let tier = parse_tier(
                cfg.tier
                    .as_deref()
                    .ok_or_else(|| domain("sgc requires --tier"))?,
            )?;
            curriculum::order_sgc(&partition(m)?, tier, cfg.seed)
        }
        (Strategy::Gfc, Some(m)) => curriculum::order_gfc(&partition(m)?, cfg.seed),
        (Strategy::Grc, Some(m)) => curriculum::order_grc(&partition(m)?, cfg.seed),
        (_, None) => unreachable!("metric checked above"),
    };

    let mut input_digests = BTreeMap::new();
    input_digests.insert("problems".to_string(), sha256_hex(&problem_bytes));
    input_digests.insert("scores".to_string(), scores_digest);
    let options = EmitOptions {
        repeat: cfg.repeat,
        input_digests,
    };
    let mut train = Vec::new();
    let mut plan_json = Vec::new();
    curriculum::emit_plan(&plan, &problems, &mut train, &mut plan_json, &options)
        .map_err(curriculum_err)?;
    write_out(&cfg.out, "ordered_train.jsonl", &train)?;
    write_out(&cfg.out, "plan.json", &plan_json)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSummary {
    pub mean: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub corpus_size: usize,
    pub sample_size: usize,
    pub seed: u64,
    pub prng: String,
    pub metrics: BTreeMap<String, MetricSummary>,
    pub sampled_ids: Vec<String>,
}

/// Means over a seeded sample of `sample_size` problems.
pub fn sample_report(
    scores: &[MetricVector],
    metrics: &[Metric],
    sample_size: usize,
    seed: u64,
) -> Result<SampleReport, CliError> {
    if sample_size > scores.len() {
        return Err(domain(format!(
            "SampleTooLarge: sample of {sample_size} from {} problems",
            scores.len()
        )));
    }
    let ids: Vec<String> = scores.iter().map(|v| v.problem_id.clone()).collect();
    let sampled: Vec<String> = prng::shuffled_ids(&ids, seed)
        .into_iter()
        .take(sample_size)
        .collect();
    let by_id: HashMap<&str, &MetricVector> =
        scores.iter().map(|v| (v.problem_id.as_str(), v)).collect();
    let chosen: Vec<&MetricVector> = sampled.iter().map(|id| by_id[id.as_str()]).collect();
    let summaries = metrics
        .iter()
        .map(|&m| {
            let values: Vec<f64> = chosen.iter().filter_map(|v| v.get(m)).collect();
            (
                m.name().to_string(),
                MetricSummary {
                    mean: sum::mean(values.iter().copied()),
                    count: values.len(),
                },
            )
        })
        .collect();
    Ok(SampleReport {
        corpus_size: scores.len(),
        sample_size,
        seed,
        prng: PRNG_NAME.to_string(),
        metrics: summaries,
        sampled_ids: sampled,
    })
}

pub fn cmd_report(cfg: &RunConfig) -> Result<(), CliError> {
    let (scores, _) = load_scores(cfg)?;
    let mut metrics = parse_metrics(cfg)?;
    if metrics.is_empty() {
        metrics = Metric::ALL.to_vec();
    }
    let report = sample_report(&scores, &metrics, cfg.sample_size, cfg.seed)?;
    write_out(&cfg.out, "report.json", &pretty(&report))?;
    Ok(())
}
