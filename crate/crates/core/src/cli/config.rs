//! Flat `key = value` study configuration files.
//!
//! ```text
//! # benchmark, k = 1
//! problem = paper
//! k = 1
//! study_levels = 2, 4, 8, 16
//! reference_n = 128
//! ```
//!
//! Keys not given keep their defaults (see [`StudyConfig::default`]).

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::analysis::{ProblemKind, StudyConfig};
use crate::error::{HdgError, Result};
use crate::hdg::{HMode, Strategy, SUPPORTED_DEGREES};
use crate::mesh::doubling_steps;

/// Reference refinement required by `problem = paper` studies.
pub const BENCHMARK_REFERENCE_RATIO: usize = 8;

pub const KEYS: [&str; 11] = [
    "problem",
    "k",
    "study_levels",
    "reference_n",
    "strategy",
    "h_mode",
    "tau2",
    "beta",
    "gamma",
    "domain_length",
    "output_dir",
];

fn err(line: usize, message: impl Into<String>) -> HdgError {
    HdgError::Config { line, message: message.into() }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| err(line, format!("{key}: cannot parse '{v}'")))
}

fn parse_positive(line: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = parse_num(line, key, v)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(err(line, format!("{key} must be a positive number, got {v}")));
    }
    Ok(x)
}

fn parse_list<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').map(|s| parse_num(line, key, s.trim())).collect()
}

/// Parses a configuration; `base` resolves a relative `output_dir`.
pub fn parse_config(text: &str, base: Option<&Path>) -> Result<StudyConfig> {
    let mut cfg = StudyConfig::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| err(line, format!("expected key = value, got '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(err(line, format!("unknown key '{key}'")));
        }
        if let Some(prev) = seen.insert(key.to_string(), line) {
            return Err(err(line, format!("duplicate key '{key}' (first given on line {prev})")));
        }
        if value.is_empty() {
            return Err(err(line, format!("{key}: missing value")));
        }
        match key {
            "problem" => {
                cfg.problem = match value {
                    "paper" => ProblemKind::Benchmark,
                    "mms" => ProblemKind::Mms,
                    "zero" => ProblemKind::Zero,
                    _ => return Err(err(line, format!("problem must be paper, mms or zero, got '{value}'"))),
                }
            }
            "k" => {
                cfg.k = parse_num(line, key, value)?;
                if !SUPPORTED_DEGREES.contains(&cfg.k) {
                    return Err(err(line, format!("k must be 0, 1 or 2, got {}", cfg.k)));
                }
            }
            "study_levels" => cfg.study_levels = parse_list(line, key, value)?,
            "reference_n" => cfg.reference_n = parse_num(line, key, value)?,
            "strategy" => {
                cfg.strategy = match value {
                    "monolithic" => Strategy::Monolithic,
                    "condensed" => Strategy::Condensed,
                    _ => return Err(err(line, format!("strategy must be monolithic or condensed, got '{value}'"))),
                }
            }
            "h_mode" => {
                cfg.h_mode = match value {
                    "local" => HMode::Local,
                    "global" => HMode::Global,
                    _ => return Err(err(line, format!("h_mode must be local or global, got '{value}'"))),
                }
            }
            "tau2" => cfg.tau2 = parse_positive(line, key, value)?,
            "gamma" => cfg.gamma = parse_positive(line, key, value)?,
            "domain_length" => cfg.domain_length = parse_positive(line, key, value)?,
            "beta" => {
                let b: Vec<f64> = parse_list(line, key, value)?;
                if b.len() != 2 || b.iter().any(|x| !x.is_finite()) {
                    return Err(err(line, "beta needs two finite numbers"));
                }
                cfg.beta = [b[0], b[1]];
            }
            "output_dir" => {
                let p = PathBuf::from(value);
                cfg.output_dir = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p,
                };
            }
            _ => unreachable!("key checked above"),
        }
    }

    let at = |key: &str| seen.get(key).copied().unwrap_or(0);
    let levels = &cfg.study_levels;
    if levels.is_empty() || levels.contains(&0) {
        return Err(err(at("study_levels"), "study_levels must be positive integers"));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(err(at("study_levels"), "study_levels must be strictly increasing"));
    }
    if let Some(bad) = levels.iter().find(|&&n| doubling_steps(levels[0], n).is_none()) {
        return Err(err(
            at("study_levels"),
            format!("invariant violated: every level must be {} times a power of two (got {bad})", levels[0]),
        ));
    }
    let finest = *levels.last().expect("non-empty");
    if cfg.problem == ProblemKind::Benchmark {
        if cfg.reference_n < BENCHMARK_REFERENCE_RATIO * finest {
            return Err(err(
                at("reference_n"),
                format!(
                    "invariant violated: reference_n >= {BENCHMARK_REFERENCE_RATIO} x max(study_levels) = {} (got {})",
                    BENCHMARK_REFERENCE_RATIO * finest,
                    cfg.reference_n
                ),
            ));
        }
        if doubling_steps(levels[0], cfg.reference_n).is_none() {
            return Err(err(at("reference_n"), "invariant violated: reference_n must be a power-of-two refinement of the levels"));
        }
    }
    Ok(cfg)
}

pub fn read_config(path: &Path) -> Result<StudyConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, path.parent())
}
