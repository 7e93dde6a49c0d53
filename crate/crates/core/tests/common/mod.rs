//! Helpers shared by the integration targets: an independent answer oracle
//! over `i128` fractions, the 50-case answer list, and a driver that pushes
//! the checked-in corpus through every CLI subcommand.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

// ---------------------------------------------------------------------------
// answer oracle
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum OracleAnswer {
    /// Reduced `num/den` with `den > 0`, and whether a decimal point was seen.
    Number {
        num: i128,
        den: i128,
        decimal: bool,
    },
    Text(String),
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn reduced(num: i128, den: i128, decimal: bool) -> OracleAnswer {
    let g = gcd(num, den).max(1);
    let sign = if den < 0 { -1 } else { 1 };
    OracleAnswer::Number {
        num: sign * num / g,
        den: sign * den / g,
        decimal,
    }
}

fn unwrap_layer(s: &str) -> Option<String> {
    let s = s.trim();
    if let Some(pos) = s.rfind("\\boxed{") {
        let body = &s[pos + "\\boxed{".len()..];
        let mut depth = 1;
        for (i, ch) in body.char_indices() {
            if ch == '{' {
                depth += 1;
            }
            if ch == '}' {
                depth -= 1;
                if depth == 0 {
                    return Some(body[..i].to_string());
                }
            }
        }
    }
    let pairs = [("$$", "$$"), ("$", "$"), ("\\(", "\\)"), ("\\[", "\\]")];
    for (l, r) in pairs {
        if s.len() >= l.len() + r.len() && s.starts_with(l) && s.ends_with(r) {
            return Some(s[l.len()..s.len() - r.len()].to_string());
        }
    }
    s.strip_suffix('.').map(str::to_string)
}

/// Digits-only string with optional well-formed thousands commas, then an
/// optional fraction after one point. Returns (num, den, saw_point).
fn oracle_literal(s: &str) -> Option<(i128, i128, bool)> {
    let (whole, frac) = match s.find('.') {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let groups: Vec<&str> = whole.split(',').collect();
    if groups.len() > 1 {
        let first_ok = (1..=3).contains(&groups[0].len());
        let rest_ok = groups[1..].iter().all(|g| g.len() == 3);
        if !first_ok || !rest_ok {
            return None;
        }
    }
    let whole: String = groups.concat();
    let all_digits = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    if !all_digits(&whole) {
        return None;
    }
    match frac {
        None => {
            if whole.is_empty() {
                return None;
            }
            Some((whole.parse().ok()?, 1, false))
        }
        Some(f) => {
            if !all_digits(f) || (whole.is_empty() && f.is_empty()) {
                return None;
            }
            let mut num: i128 = if whole.is_empty() {
                0
            } else {
                whole.parse().ok()?
            };
            let mut den: i128 = 1;
            for c in f.chars() {
                num = num * 10 + (c as i128 - '0' as i128);
                den *= 10;
            }
            Some((num, den, true))
        }
    }
}

fn oracle_signed_integer(s: &str) -> Option<i128> {
    let s = s.trim();
    let (neg, body) = match s.chars().next()? {
        '-' => (true, s[1..].trim_start()),
        '+' => (false, s[1..].trim_start()),
        _ => (false, s),
    };
    match oracle_literal(body)? {
        (n, 1, false) => Some(if neg { -n } else { n }),
        _ => None,
    }
}

fn oracle_number(s: &str) -> Option<OracleAnswer> {
    let s = s.replace('\u{2212}', "-");
    let mut s = s.trim().to_string();
    let mut percent = false;
    for suffix in ["\\%", "%"] {
        if s.ends_with(suffix) {
            s.truncate(s.len() - suffix.len());
            s = s.trim_end().to_string();
            percent = true;
            break;
        }
    }
    let mut neg = false;
    if let Some(rest) = s.strip_prefix('-') {
        neg = true;
        s = rest.trim_start().to_string();
    } else if let Some(rest) = s.strip_prefix('+') {
        s = rest.trim_start().to_string();
    }
    let (num, den, decimal) = if let Some(body) = ["\\frac", "\\dfrac", "\\tfrac"]
        .iter()
        .find_map(|p| s.strip_prefix(p))
    {
        let parts: Vec<&str> = body.split(['{', '}']).collect();
        // "{a}{b}" splits into ["", a, "", b, ""]
        if parts.len() != 5 || !parts[0].is_empty() || !parts[2].is_empty() || !parts[4].is_empty()
        {
            return None;
        }
        (
            oracle_signed_integer(parts[1])?,
            oracle_signed_integer(parts[3])?,
            false,
        )
    } else if s.matches('/').count() == 1 {
        let (a, b) = s.split_once('/').unwrap();
        (oracle_signed_integer(a)?, oracle_signed_integer(b)?, false)
    } else {
        oracle_literal(&s)?
    };
    if den == 0 {
        return None;
    }
    let num = if neg { -num } else { num };
    let den = if percent { den * 100 } else { den };
    Some(reduced(num, den, decimal))
}

/// Independent normaliser used to cross-check the library.
pub fn oracle_normalize(raw: &str) -> Option<OracleAnswer> {
    let mut s = raw.to_string();
    while let Some(next) = unwrap_layer(&s) {
        s = next;
    }
    let s = s.to_lowercase();
    let s = s.split_whitespace().collect::<Vec<_>>().join(" ");
    if s.is_empty() {
        return None;
    }
    Some(oracle_number(&s).unwrap_or(OracleAnswer::Text(s)))
}

pub fn oracle_equivalent(a: &OracleAnswer, b: &OracleAnswer) -> bool {
    use OracleAnswer::*;
    match (a, b) {
        (
            Number {
                num: n1,
                den: d1,
                decimal: x1,
            },
            Number {
                num: n2,
                den: d2,
                decimal: x2,
            },
        ) => {
            let cross = n1 * d2 - n2 * d1;
            if *x1 || *x2 {
                // |n1/d1 - n2/d2| <= 1e-6
                cross.abs() * 1_000_000 <= d1 * d2
            } else {
                cross == 0
            }
        }
        (Text(x), Text(y)) => x == y,
        _ => false,
    }
}

/// (left, right, expected equivalence)
pub const ANSWER_CASES: [(&str, &str, bool); 50] = [
    ("\\boxed{42}", "42", true),
    (" 1,000 ", "1000", true),
    ("3/4", "0.75", true),
    ("0.5", "1/2", true),
    ("0.3333333", "1/3", true),
    ("0.333", "1/3", false),
    ("42", "43", false),
    ("\\boxed{1/2}", "0.5", true),
    ("-3/4", "-0.75", true),
    ("-3/4", "3/4", false),
    ("1,234,567", "1234567", true),
    ("1,234,567.5", "1234567.5", true),
    ("12,34", "1234", false),
    ("$5$", "5", true),
    ("$$-2$$", "-2", true),
    ("\\boxed{\\frac{3}{8}}", "0.375", true),
    ("\\frac{2}{4}", "1/2", true),
    ("\\dfrac{7}{2}", "3.5", true),
    ("50%", "1/2", true),
    ("12.5%", "0.125", true),
    ("\\boxed{-7}.", "-7", true),
    ("7.", "7", true),
    ("2.0", "2", true),
    ("0.1", "1/10", true),
    ("0.1000001", "0.1", true),
    ("0.100002", "0.1", false),
    ("1/3", "2/6", true),
    ("1/3", "0.3333", false),
    ("-0", "0", true),
    ("+5", "5", true),
    ("Yes", "yes", true),
    ("No.", "no", true),
    ("\u{2212}5", "-5", true),
    ("2x+1", "1+2x", false),
    ("\\boxed{\\boxed{9}}", "9", true),
    ("The answer is \\boxed{12}", "12", true),
    ("10,000,000", "1e7", false),
    ("-1,000", "-1000", true),
    ("3 / 4", "0.75", true),
    ("1/0", "0", false),
    (".5", "0.5", true),
    ("0.50", "1/2", true),
    ("1000000", "1,000,000.0", true),
    ("100", "100.0000001", true),
    ("-0.25", "-1/4", true),
    ("\\boxed{1,000}", "1000", true),
    ("4/6", "0.6667", false),
    ("0.6666667", "2/3", true),
    ("99%", "0.99", true),
    ("\\(8\\)", "8", true),
];

/// Compares the library against the oracle on every case; returns one
/// description per disagreement.
pub fn answer_mismatches() -> Vec<String> {
    use currikit::answer::{equivalent, normalize};
    use num_traits::ToPrimitive;

    let mut out = Vec::new();
    for (i, (a, b, expected)) in ANSWER_CASES.iter().enumerate() {
        let oa = oracle_normalize(a).expect("fixture answers are non-empty");
        let ob = oracle_normalize(b).expect("fixture answers are non-empty");
        let oracle = oracle_equivalent(&oa, &ob);
        let (la, lb) = (normalize(a).unwrap(), normalize(b).unwrap());
        let library = equivalent(&la, &lb);
        if oracle != *expected || library != oracle {
            out.push(format!(
                "case {i} {a:?} vs {b:?}: expected {expected}, oracle {oracle}, library {library}"
            ));
        }
        for (raw, lib, orc) in [(a, &la, &oa), (b, &lb, &ob)] {
            let agree = match (&lib.numeric_value, orc) {
                (Some(v), OracleAnswer::Number { num, den, decimal }) => {
                    v.numer().to_i128() == Some(*num)
                        && v.denom().to_i128() == Some(*den)
                        && lib.from_decimal == *decimal
                }
                (None, OracleAnswer::Text(t)) => &lib.canonical_text == t,
                _ => false,
            };
            if !agree {
                out.push(format!(
                    "case {i} {raw:?}: library {lib:?} vs oracle {orc:?}"
                ));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// CLI driving
// ---------------------------------------------------------------------------

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/corpus12")
}

pub fn goldens_path() -> PathBuf {
    fixture_dir().join("goldens.txt")
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_currikit")
}

/// Runs the binary with the given thread count (`None` leaves the variable
/// unset).
pub fn run_cli(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("CURRIKIT_THREADS", t),
        None => cmd.env_remove("CURRIKIT_THREADS"),
    };
    cmd.output().expect("spawn currikit")
}

pub fn sha256_file(path: &Path) -> String {
    let bytes = fs::read(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    hex::encode(Sha256::digest(&bytes))
}

pub const STRATEGIES: [&str; 6] = ["fcl", "rcl", "sgc", "gfc", "grc", "shuf"];

/// validate, score, tier, order with every strategy, report. Returns the
/// sha256 of every output file keyed by its path under `out`, or the first
/// failing step.
pub fn run_pipeline(out: &Path, threads: Option<&str>) -> Result<BTreeMap<String, String>, String> {
    let fx = fixture_dir();
    let problems = fx.join("problems.jsonl");
    let traces = fx.join("traces.jsonl");
    let annotations = fx.join("annotations.jsonl");
    let p = |x: &Path| x.to_str().unwrap().to_string();
    let o = |sub: &str| p(&out.join(sub));
    let inputs = [
        "--problems".to_string(),
        p(&problems),
        "--traces".into(),
        p(&traces),
        "--annotations".into(),
        p(&annotations),
        "--k".into(),
        "8".into(),
    ];
    let scores = o("score/scores.jsonl");

    let mut steps: Vec<(String, Vec<String>)> = Vec::new();
    let mut validate = vec!["validate".to_string()];
    validate.extend(inputs.iter().cloned());
    validate.extend(["--out".into(), o("validate")]);
    steps.push(("validate".into(), validate));

    let mut score = vec!["score".to_string()];
    score.extend(inputs.iter().cloned());
    score.extend(["--out".into(), o("score")]);
    steps.push(("score".into(), score));

    steps.push((
        "tier".into(),
        [
            "tier",
            "--scores",
            &scores,
            "--metrics",
            "slp",
            "--out",
            &o("tier"),
        ]
        .map(String::from)
        .to_vec(),
    ));

    for s in STRATEGIES {
        let mut args = vec![
            "order".to_string(),
            "--problems".into(),
            p(&problems),
            "--scores".into(),
            scores.clone(),
            "--strategy".into(),
            s.into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            o(&format!("order_{s}")),
        ];
        if s != "shuf" {
            args.extend(["--metrics".into(), "slp".into()]);
        }
        if s == "sgc" {
            args.extend(["--tier".into(), "medium".into()]);
        }
        steps.push((format!("order {s}"), args));
    }

    steps.push((
        "report".into(),
        [
            "report",
            "--scores",
            &scores,
            "--sample-size",
            "6",
            "--seed",
            "3",
            "--out",
            &o("report"),
        ]
        .map(String::from)
        .to_vec(),
    ));

    for (name, args) in &steps {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let output = run_cli(&refs, threads);
        if !output.status.success() {
            return Err(format!(
                "{name} exited {:?}: {}",
                output.status.code(),
                String::from_utf8_lossy(&output.stderr)
            ));
        }
    }

    let mut digests = BTreeMap::new();
    collect_digests(out, out, &mut digests);
    Ok(digests)
}

fn collect_digests(root: &Path, dir: &Path, acc: &mut BTreeMap<String, String>) {
    let mut entries: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect_digests(root, &path, acc);
        } else {
            let rel = path
                .strip_prefix(root)
                .unwrap()
                .to_string_lossy()
                .replace('\\', "/");
            acc.insert(rel, sha256_file(&path));
        }
    }
}

pub fn read_goldens() -> BTreeMap<String, String> {
    let text = fs::read_to_string(goldens_path()).unwrap_or_default();
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (digest, path) = l.split_once("  ").expect("goldens line: <sha256>  <path>");
            (path.to_string(), digest.to_string())
        })
        .collect()
}

pub fn write_goldens(digests: &BTreeMap<String, String>) {
    let mut text =
        String::from("# sha256 of every pipeline output; regenerate with CURRIKIT_BLESS=1\n");
    for (path, digest) in digests {
        text.push_str(&format!("{digest}  {path}\n"));
    }
    fs::write(goldens_path(), text).expect("write goldens");
}

pub fn blessing() -> bool {
    std::env::var("CURRIKIT_BLESS").is_ok_and(|v| v == "1")
}
