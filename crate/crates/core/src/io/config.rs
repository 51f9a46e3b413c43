//! Run configuration files.
//!
//! ```text
//! # comment
//! [section_name]
//! criterion = ew_ppt
//! da = 2
//! db = 2
//! k = 5:25          # inclusive range, optional step as 1:40:3, or a list 1,2,4
//! samples = 100000
//! seed = 2024
//! ci = 0.95
//! interval = wilson # clopper_pearson | auto
//! bound = auto      # none | auto | a bound selector such as `ew alpha=1`
//! output = out.csv
//! experiment_id = fig2a
//! ```
//!
//! Unknown keys, duplicate keys and keys outside a section are errors.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::capability::{BoundChoice, GridPoint, IntervalMethod, DEFAULT_CI_LEVEL, DEFAULT_SAMPLES};
use crate::criteria::CriterionKind;
use crate::error::{Error, Result};
use crate::sampler::SeedSpec;

pub const KEYS: [&str; 11] = [
    "criterion",
    "da",
    "db",
    "k",
    "samples",
    "seed",
    "ci",
    "interval",
    "bound",
    "output",
    "experiment_id",
];

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub name: String,
    /// Line of the `[name]` header.
    pub line: usize,
    pub experiment_id: String,
    pub criterion: String,
    pub dim_a: usize,
    pub dim_b: usize,
    pub ks: Vec<usize>,
    pub n_samples: u64,
    pub seed: u64,
    pub ci_level: f64,
    pub interval: IntervalMethod,
    pub bound: Option<BoundChoice>,
    pub output: PathBuf,
}

/// Per-point master seed: the section seed mixed with `k`, so points of one
/// section do not share Ginibre columns.
pub fn point_seed(section_seed: u64, k: usize) -> u64 {
    SeedSpec::new(section_seed, 0).derive(k as u64).master_seed
}

impl SweepSection {
    pub fn grid(&self) -> Vec<GridPoint> {
        self.ks
            .iter()
            .map(|&k| GridPoint {
                criterion: self.criterion.clone(),
                dim_a: self.dim_a,
                dim_b: self.dim_b,
                k,
                n_samples: self.n_samples,
                master_seed: point_seed(self.seed, k),
                ci_level: self.ci_level,
                interval: self.interval,
            })
            .collect()
    }

    /// Output path, relative paths taken against `base`.
    pub fn output_in(&self, base: &Path) -> PathBuf {
        if self.output.is_absolute() {
            self.output.clone()
        } else {
            base.join(&self.output)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub sections: Vec<SweepSection>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// `a:b`, `a:b:step` (inclusive) or `a,b,c`; must be nonempty and ascending.
pub fn parse_k_list(raw: &str) -> std::result::Result<Vec<usize>, String> {
    let num = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| format!("'{}' is not a nonnegative integer", s.trim()))
    };
    let ks: Vec<usize> = if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        let (lo, hi, step) = match parts.as_slice() {
            [lo, hi] => (num(lo)?, num(hi)?, 1),
            [lo, hi, step] => (num(lo)?, num(hi)?, num(step)?),
            _ => return Err(format!("bad range '{raw}' (expected a:b or a:b:step)")),
        };
        if step == 0 {
            return Err("range step must be positive".into());
        }
        if lo > hi {
            return Err(format!("range '{raw}' is empty or descending"));
        }
        (lo..=hi).step_by(step).collect()
    } else {
        raw.split(',').map(num).collect::<std::result::Result<_, _>>()?
    };
    if ks.is_empty() {
        return Err("empty k list".into());
    }
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("k values in '{raw}' must be strictly ascending"));
    }
    Ok(ks)
}

#[derive(Default)]
struct Pending {
    name: String,
    line: usize,
    values: Vec<(String, String, usize)>,
}

impl Pending {
    fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.values
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    }

    fn finish(self) -> Result<SweepSection> {
        let section = &self.name;
        let required = |key: &str| {
            self.get(key)
                .ok_or_else(|| err(self.line, format!("section [{section}] is missing '{key}'")))
        };
        fn parsed<T: std::str::FromStr>(section: &str, key: &str, (raw, line): (&str, usize)) -> Result<T> {
            raw.parse()
                .map_err(|_| err(line, format!("section [{section}]: {key} = '{raw}' is not valid")))
        }

        let (criterion, crit_line) = required("criterion")?;
        let name = criterion.split('(').next().unwrap_or("").trim();
        if CriterionKind::from_name(name).is_none() {
            return Err(err(
                crit_line,
                format!(
                    "section [{section}]: unknown criterion '{name}' (expected one of {})",
                    CriterionKind::ALL.map(|k| k.name()).join(", ")
                ),
            ));
        }
        let dim_a: usize = parsed(section, "da", required("da")?)?;
        let dim_b: usize = parsed(section, "db", required("db")?)?;
        for (key, d) in [("da", dim_a), ("db", dim_b)] {
            if d == 0 {
                return Err(err(self.get(key).unwrap().1, format!("section [{section}]: {key} must be positive")));
            }
        }
        let (k_raw, k_line) = required("k")?;
        let ks = parse_k_list(k_raw).map_err(|m| err(k_line, format!("section [{section}]: {m}")))?;
        let n_samples = match self.get("samples") {
            Some(v) => parsed(section, "samples", v)?,
            None => DEFAULT_SAMPLES,
        };
        let seed = match self.get("seed") {
            Some(v) => parsed(section, "seed", v)?,
            None => DEFAULT_SEED,
        };
        let ci_level = match self.get("ci") {
            Some(v) => parsed(section, "ci", v)?,
            None => DEFAULT_CI_LEVEL,
        };
        let interval = match self.get("interval") {
            Some((raw, line)) => IntervalMethod::from_name(raw).ok_or_else(|| {
                err(line, format!("section [{section}]: unknown interval '{raw}'"))
            })?,
            None => IntervalMethod::Wilson,
        };
        let bound = match self.get("bound") {
            None | Some(("none", _)) => None,
            Some((raw, line)) => Some(
                BoundChoice::parse(raw).map_err(|e| err(line, format!("section [{section}]: {e}")))?,
            ),
        };
        let output = PathBuf::from(required("output")?.0);
        let experiment_id = self.get("experiment_id").map_or(section.clone(), |v| v.0.to_string());
        Ok(SweepSection {
            name: self.name.clone(),
            line: self.line,
            experiment_id,
            criterion: criterion.to_string(),
            dim_a,
            dim_b,
            ks,
            n_samples,
            seed,
            ci_level,
            interval,
            bound,
            output,
        })
    }
}

fn strip_comment(line: &str) -> &str {
    if line.trim_start().starts_with('#') {
        return "";
    }
    match line.find(" #").or_else(|| line.find("\t#")) {
        Some(i) => &line[..i],
        None => line,
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections = Vec::new();
        let mut names = BTreeSet::new();
        let mut current: Option<Pending> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(str::trim)
                    .filter(|n| !n.is_empty())
                    .ok_or_else(|| err(line_no, format!("malformed section header '{line}'")))?;
                if !names.insert(name.to_string()) {
                    return Err(err(line_no, format!("duplicate section [{name}]")));
                }
                if let Some(done) = current.take() {
                    sections.push(done.finish()?);
                }
                current = Some(Pending {
                    name: name.to_string(),
                    line: line_no,
                    values: Vec::new(),
                });
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(line_no, format!("expected 'key = value', got '{line}'")))?;
            let section = current
                .as_mut()
                .ok_or_else(|| err(line_no, format!("key '{key}' appears before any [section]")))?;
            if !KEYS.contains(&key) {
                return Err(err(
                    line_no,
                    format!(
                        "section [{}]: unknown key '{key}' (allowed: {})",
                        section.name,
                        KEYS.join(", ")
                    ),
                ));
            }
            if section.get(key).is_some() {
                return Err(err(line_no, format!("section [{}]: duplicate key '{key}'", section.name)));
            }
            if value.is_empty() {
                return Err(err(line_no, format!("section [{}]: '{key}' has no value", section.name)));
            }
            section.values.push((key.to_string(), value.to_string(), line_no));
        }
        if let Some(done) = current.take() {
            sections.push(done.finish()?);
        }
        if sections.is_empty() {
            return Err(err(0, "configuration has no sections"));
        }
        Ok(RunConfig { sections })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
