//! Flat `key = value` experiment files with `[section]` headers.
//!
//! ```text
//! kind = deviation
//! seed = 7
//!
//! [map]
//! matrix = 2 1 1 1
//!
//! [observable]
//! terms = 1 0 1 0; -1 0 1 0
//!
//! [sweep]
//! n = 64, 128, 256, 512
//! delta = 0.2, 0.4
//! theta = uniform 4
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anosov_core::classical::{HyperbolicToralMap, TrigPolynomial};
use anosov_core::measures::TimeWeights;
use anosov_core::quantum::PlanckData;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Pressure,
    Rate,
    Deviation,
    Variance,
    Egorov,
    Uncertainty,
    NormDecay,
    Subadditivity,
    Observability,
    Survivor,
    Entropy,
}

impl Kind {
    pub const ALL: [Kind; 11] = [
        Kind::Pressure,
        Kind::Rate,
        Kind::Deviation,
        Kind::Variance,
        Kind::Egorov,
        Kind::Uncertainty,
        Kind::NormDecay,
        Kind::Subadditivity,
        Kind::Observability,
        Kind::Survivor,
        Kind::Entropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Pressure => "pressure",
            Kind::Rate => "rate",
            Kind::Deviation => "deviation",
            Kind::Variance => "variance",
            Kind::Egorov => "egorov",
            Kind::Uncertainty => "uncertainty",
            Kind::NormDecay => "norm-decay",
            Kind::Subadditivity => "subadditivity",
            Kind::Observability => "observability",
            Kind::Survivor => "survivor",
            Kind::Entropy => "entropy",
        }
    }

    pub fn from_name(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Kinds that sweep over the Hilbert-space dimension N.
    pub fn sweeps_dimension(self) -> bool {
        !matches!(
            self,
            Kind::Pressure | Kind::Rate | Kind::Variance | Kind::Survivor
        )
    }

    fn needs_observable(self) -> bool {
        matches!(
            self,
            Kind::Rate
                | Kind::Deviation
                | Kind::Variance
                | Kind::Egorov
                | Kind::Observability
                | Kind::Survivor
        )
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ThetaSpec {
    Delta(i64),
    Uniform(usize),
    Long,
    Short,
}

impl ThetaSpec {
    pub fn weights(&self, plk: PlanckData) -> anosov_core::Result<TimeWeights> {
        match self {
            ThetaSpec::Delta(t) => Ok(TimeWeights::delta(*t)),
            ThetaSpec::Uniform(t) => TimeWeights::uniform(*t),
            ThetaSpec::Long => Ok(TimeWeights::long_window(plk)),
            ThetaSpec::Short => Ok(TimeWeights::short_window(plk)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionSpec {
    pub k: usize,
    pub width: f64,
    pub band: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub map: HyperbolicToralMap,
    pub observable: Option<TrigPolynomial>,
    pub observable_path: Option<PathBuf>,
    pub dims: Vec<usize>,
    pub theta: ThetaSpec,
    pub deltas: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: PathBuf,
    /// Periodic-orbit order for the classical kinds.
    pub order: usize,
    /// Word length, Egorov step count, or observation time, depending on kind.
    pub steps: usize,
    pub states: usize,
    pub samples: usize,
    pub partition: PartitionSpec,
    pub split: (usize, usize),
    pub resolution: usize,
    /// Config text (minus `out`) and observable file bytes, hashed into the run id.
    pub source: Vec<u8>,
}

impl ExperimentConfig {
    /// SHA-256 over the config contents, the observable file and the seed.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(&self.source);
        h.update(format!("\nseed={}", self.seed).as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} config error(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  {e}")?;
        }
        Ok(())
    }
}

const KEYS: &[(&str, &[&str])] = &[
    ("", &["kind", "seed", "threads", "out"]),
    ("map", &["matrix"]),
    ("observable", &["file", "terms"]),
    ("sweep", &["n", "delta", "s", "theta"]),
    (
        "run",
        &[
            "order",
            "steps",
            "states",
            "samples",
            "partition",
            "split",
            "resolution",
        ],
    ),
];

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigErrors> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ConfigErrors(vec![ConfigError {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        }])
    })?;
    parse_str(&text, path.parent().unwrap_or(Path::new(".")))
}

/// Parses config text; relative paths resolve against `base`.
pub fn parse_str(text: &str, base: &Path) -> Result<ExperimentConfig, ConfigErrors> {
    let mut errs = Vec::new();
    let mut entries: HashMap<(String, String), (usize, String)> = HashMap::new();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            match rest.strip_suffix(']') {
                Some(name) if KEYS.iter().any(|(s, _)| *s == name.trim()) => {
                    section = name.trim().to_string();
                }
                Some(name) => {
                    errs.push(err(line_no, format!("unknown section [{}]", name.trim())));
                    section = format!("?{}", name.trim());
                }
                None => errs.push(err(line_no, "unterminated section header".into())),
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errs.push(err(
                line_no,
                format!("expected `key = value`, found {line:?}"),
            ));
            continue;
        };
        let key = key.trim().to_string();
        if section.starts_with('?') {
            continue;
        }
        let known = KEYS
            .iter()
            .find(|(s, _)| *s == section)
            .is_some_and(|(_, keys)| keys.contains(&key.as_str()));
        if !known {
            errs.push(err(
                line_no,
                format!("unknown key `{}`", qualified(&section, &key)),
            ));
            continue;
        }
        let slot = (section.clone(), key.clone());
        if let Some((first, _)) = entries.get(&slot) {
            errs.push(err(
                line_no,
                format!(
                    "duplicate key `{}` on lines {first} and {line_no}",
                    qualified(&section, &key)
                ),
            ));
            continue;
        }
        entries.insert(slot, (line_no, value.trim().to_string()));
    }

    let mut p = Fields {
        entries,
        errs: &mut errs,
    };
    let kind = match p.get("", "kind") {
        None => {
            p.errs.push(err(0, "missing required key `kind`".into()));
            None
        }
        Some((l, v)) => {
            let k = Kind::from_name(&v);
            if k.is_none() {
                let names: Vec<_> = Kind::ALL.iter().map(|k| k.name()).collect();
                p.errs.push(err(
                    l,
                    format!("unknown kind {v:?}; expected one of {}", names.join(", ")),
                ));
            }
            k
        }
    };
    let seed = p.parse::<u64>("", "seed").unwrap_or(0);
    let threads = p.parse::<usize>("", "threads");
    if let (Some(0), Some((l, _))) = (threads, p.get("", "threads")) {
        p.errs.push(err(l, "threads must be ≥ 1".into()));
    }
    let out = p
        .get("", "out")
        .map(|(_, v)| base.join(v))
        .unwrap_or_else(|| base.join("out"));

    let map = match p.get("map", "matrix") {
        None => Some(HyperbolicToralMap::cat()),
        Some((l, v)) => {
            let nums: Result<Vec<i64>, _> = v.split_whitespace().map(str::parse).collect();
            match nums {
                Ok(n) if n.len() == 4 => {
                    match HyperbolicToralMap::new([[n[0], n[1]], [n[2], n[3]]]) {
                        Ok(m) => Some(m),
                        Err(e) => {
                            p.errs.push(err(l, e.to_string()));
                            None
                        }
                    }
                }
                _ => {
                    p.errs
                        .push(err(l, format!("matrix needs 4 integers, found {v:?}")));
                    None
                }
            }
        }
    };

    let mut source: Vec<u8> = text
        .lines()
        .filter(|l| !is_out_line(l))
        .flat_map(|l| l.bytes().chain(std::iter::once(b'\n')))
        .collect();
    let mut observable = None;
    let mut observable_path = None;
    if let Some((l, v)) = p.get("observable", "file") {
        let path = base.join(&v);
        match std::fs::read_to_string(&path) {
            Ok(body) => {
                match TrigPolynomial::parse(&body) {
                    Ok(a) => observable = Some(a),
                    Err(e) => p.errs.push(err(l, format!("{}: {e}", path.display()))),
                }
                source.extend_from_slice(b"\n--observable--\n");
                source.extend_from_slice(body.as_bytes());
            }
            Err(e) => p
                .errs
                .push(err(l, format!("observable file {}: {e}", path.display()))),
        }
        observable_path = Some(path);
    }
    if let Some((l, v)) = p.get("observable", "terms") {
        if observable_path.is_some() {
            p.errs
                .push(err(l, "give either `file` or `terms`, not both".into()));
        }
        match TrigPolynomial::parse(&v.replace(';', "\n")) {
            Ok(a) => observable = Some(a),
            Err(e) => p.errs.push(err(l, e.to_string())),
        }
    }
    if let Some(k) = kind {
        if k.needs_observable()
            && observable.is_none()
            && p.get("observable", "file").is_none()
            && p.get("observable", "terms").is_none()
        {
            p.errs
                .push(err(0, format!("kind {k} needs an [observable] section")));
        }
    }

    let dims = p.list::<usize>("sweep", "n").unwrap_or_default();
    if let Some((l, _)) = p.get("sweep", "n") {
        if let Some(bad) = dims.iter().find(|&&n| n < 2) {
            p.errs.push(err(l, format!("N = {bad} is below 2")));
        }
        p.check_sorted(l, "n", &dims.iter().map(|&n| n as f64).collect::<Vec<_>>());
    } else if kind.is_some_and(Kind::sweeps_dimension) {
        p.errs
            .push(err(0, "missing `[sweep] n` (list of dimensions)".into()));
    }
    let deltas = p.list::<f64>("sweep", "delta").unwrap_or_else(|| vec![0.2]);
    if let Some((l, _)) = p.get("sweep", "delta") {
        p.check_sorted(l, "delta", &deltas);
    }
    let s_grid = match p.get("sweep", "s") {
        None => linspace(-4.0, 4.0, 81),
        Some((l, v)) => match parse_range(&v) {
            Some(g) => {
                p.check_sorted(l, "s", &g);
                g
            }
            None => {
                p.errs
                    .push(err(l, format!("s grid must be `lo:hi:count`, found {v:?}")));
                Vec::new()
            }
        },
    };
    let theta = match p.get("sweep", "theta") {
        None => ThetaSpec::Delta(0),
        Some((l, v)) => {
            let words: Vec<&str> = v.split_whitespace().collect();
            match words.as_slice() {
                ["delta", t] => t.parse().ok().map(ThetaSpec::Delta),
                ["uniform", t] => t.parse().ok().filter(|&t| t > 0).map(ThetaSpec::Uniform),
                ["long"] => Some(ThetaSpec::Long),
                ["short"] => Some(ThetaSpec::Short),
                _ => None,
            }
            .unwrap_or_else(|| {
                p.errs.push(err(
                    l,
                    format!("theta must be `delta T`, `uniform T`, `long` or `short`, found {v:?}"),
                ));
                ThetaSpec::Delta(0)
            })
        }
    };

    let order = p.parse("run", "order").unwrap_or(10);
    let steps = p.parse("run", "steps").unwrap_or(3);
    let states = p.parse("run", "states").unwrap_or(10);
    let samples = p.parse("run", "samples").unwrap_or(100_000);
    let resolution = p.parse("run", "resolution").unwrap_or(256);
    let partition = match p.get("run", "partition") {
        None => PartitionSpec {
            k: 3,
            width: 0.055,
            band: 31,
        },
        Some((l, v)) => {
            let w: Vec<&str> = v.split_whitespace().collect();
            let parsed = (w.len() == 3)
                .then(|| Some((w[0].parse().ok()?, w[1].parse().ok()?, w[2].parse().ok()?)))
                .flatten();
            match parsed {
                Some((k, width, band)) => PartitionSpec { k, width, band },
                None => {
                    p.errs.push(err(
                        l,
                        format!("partition must be `K width band`, found {v:?}"),
                    ));
                    PartitionSpec {
                        k: 3,
                        width: 0.055,
                        band: 31,
                    }
                }
            }
        }
    };
    let split = match p.list::<usize>("run", "split") {
        Some(v) if v.len() == 2 => (v[0], v[1]),
        Some(_) => {
            let l = p.get("run", "split").map_or(0, |x| x.0);
            p.errs.push(err(l, "split must be `n0, m`".into()));
            (2, 3)
        }
        None => (2, 3),
    };

    errs.sort_by_key(|e| e.line);
    match (errs.is_empty(), kind, map) {
        (true, Some(kind), Some(map)) => Ok(ExperimentConfig {
            kind,
            map,
            observable,
            observable_path,
            dims,
            theta,
            deltas,
            s_grid,
            seed,
            threads,
            out,
            order,
            steps,
            states,
            samples,
            partition,
            split,
            resolution,
            source,
        }),
        _ => Err(ConfigErrors(errs)),
    }
}

struct Fields<'a> {
    entries: HashMap<(String, String), (usize, String)>,
    errs: &'a mut Vec<ConfigError>,
}

impl Fields<'_> {
    fn get(&self, section: &str, key: &str) -> Option<(usize, String)> {
        self.entries
            .get(&(section.to_string(), key.to_string()))
            .cloned()
    }

    fn parse<T: std::str::FromStr>(&mut self, section: &str, key: &str) -> Option<T> {
        let (l, v) = self.get(section, key)?;
        let out = v.parse().ok();
        if out.is_none() {
            self.errs.push(err(
                l,
                format!("malformed value {v:?} for `{}`", qualified(section, key)),
            ));
        }
        out
    }

    fn list<T: std::str::FromStr>(&mut self, section: &str, key: &str) -> Option<Vec<T>> {
        let (l, v) = self.get(section, key)?;
        let mut out = Vec::new();
        for item in v.split(',') {
            match item.trim().parse() {
                Ok(x) => out.push(x),
                Err(_) => {
                    self.errs.push(err(
                        l,
                        format!(
                            "malformed number {:?} in `{}`",
                            item.trim(),
                            qualified(section, key)
                        ),
                    ));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn check_sorted(&mut self, line: usize, key: &str, v: &[f64]) {
        if v.windows(2).any(|w| w[0] >= w[1]) {
            self.errs
                .push(err(line, format!("`{key}` must be strictly increasing")));
        }
    }
}

/// The output location does not take part in the run hash.
fn is_out_line(line: &str) -> bool {
    line.split_once('=').is_some_and(|(k, _)| k.trim() == "out")
}

fn err(line: usize, message: String) -> ConfigError {
    ConfigError { line, message }
}

fn qualified(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

fn parse_range(v: &str) -> Option<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    if parts.len() != 3 {
        return None;
    }
    let lo: f64 = parts[0].parse().ok()?;
    let hi: f64 = parts[1].parse().ok()?;
    let count: usize = parts[2].parse().ok()?;
    (count >= 2 && lo.is_finite() && hi.is_finite()).then(|| linspace(lo, hi, count))
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}
