//! Sectioned `key = value` configuration and its canonical hash.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::classify::Budgets;
use crate::curve_graph::DEFAULT_BALL_BUDGET;
use crate::walk::{BallRadius, DEFAULT_CONVOLUTION_BUDGET};

/// Parsed text: section name to key/value pairs. Keys before any section
/// header belong to `run`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawConfig {
    pub sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut raw = RawConfig::default();
        let mut section = "run".to_string();
        for (no, line) in text.lines().enumerate() {
            let line = line.split(['#', ';']).next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| config_err(no, "unterminated section header"))?.trim();
                if name.is_empty() {
                    return Err(config_err(no, "empty section name"));
                }
                section = name.to_string();
                raw.sections.entry(section.clone()).or_default();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| config_err(no, "expected key = value"))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(config_err(no, "empty key"));
            }
            if raw.sections.entry(section.clone()).or_default().insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(config_err(no, &format!("duplicate key {section}.{k}")));
            }
        }
        Ok(raw)
    }

    /// Sets `section.key`, replacing any previous value.
    pub fn set(&mut self, section: &str, key: &str, value: &str) {
        self.sections.entry(section.to_string()).or_default().insert(key.to_string(), value.to_string());
    }
}

fn config_err(line: usize, msg: &str) -> HarnessError {
    HarnessError::Config(format!("line {}: {msg}", line + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    PaFraction,
    TorelliPaFraction,
    RelLengthGrowth,
    ConjugacyBounds,
    TransienceRk,
    ExactLemma,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::PaFraction,
        Experiment::TorelliPaFraction,
        Experiment::RelLengthGrowth,
        Experiment::ConjugacyBounds,
        Experiment::TransienceRk,
        Experiment::ExactLemma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::PaFraction => "pa_fraction",
            Experiment::TorelliPaFraction => "torelli_pa_fraction",
            Experiment::RelLengthGrowth => "rel_length_growth",
            Experiment::ConjugacyBounds => "conjugacy_bounds",
            Experiment::TransienceRk => "transience_rk",
            Experiment::ExactLemma => "exact_lemma",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorChoice {
    Humphries,
    /// Torelli generators with the given count.
    Torelli(usize),
    /// A generator table file.
    Table(PathBuf),
}

/// Experiment-specific knobs. Unused ones are still hashed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    /// Separation parameters for the lemma and the dense subsets.
    pub ks: Vec<usize>,
    /// Largest `n` in the lemma sweep.
    pub n_max: usize,
    /// Random separated sets per sweep cell.
    pub sets: usize,
    /// Largest size of a random separated set.
    pub set_size: usize,
    pub radius: BallRadius,
    /// Word length of the conjugated element `s`.
    pub short_len: usize,
    /// Conjugator search radius.
    pub conjugator_radius: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { ks: vec![1, 2, 3, 4, 5], n_max: 5, sets: 50, set_size: 4, radius: BallRadius::Floor, short_len: 2, conjugator_radius: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub genus: i64,
    pub punctures: i64,
    pub generators: GeneratorChoice,
    /// 1-based generator indices to keep; empty keeps all.
    pub restrict: Vec<usize>,
    /// Step weights in the order `s_1, s_1^-1, s_2, ...`; empty is uniform.
    pub weights: Vec<BigRational>,
    pub lengths: Vec<usize>,
    pub samples: u64,
    pub seed: u64,
    pub budgets: Budgets,
    pub ball_budget: usize,
    pub convolution_budget: u128,
    pub params: Params,
    /// Not hashed.
    pub out: PathBuf,
    /// Not hashed; 0 uses every core.
    pub workers: usize,
}

const KNOWN: &[(&str, &[&str])] = &[
    ("run", &["experiment", "seed", "samples", "lengths", "out", "workers"]),
    ("surface", &["genus", "punctures"]),
    ("generators", &["kind", "count", "table", "restrict", "weights"]),
    ("budgets", &["max_order", "search_bound", "iterations", "threshold", "tolerance", "ball", "convolution"]),
    ("params", &["k", "n_max", "sets", "set_size", "radius", "short_len", "conjugator_radius"]),
];

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, HarnessError> {
    if v.trim().is_empty() {
        return Ok(vec![]);
    }
    v.split(',').map(|x| x.trim().parse::<T>().map_err(|_| HarnessError::Config(format!("{key}: cannot parse {x:?}")))).collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, HarnessError> {
    v.parse::<T>().map_err(|_| HarnessError::Config(format!("{key}: cannot parse {v:?}")))
}

fn parse_rational(key: &str, v: &str) -> Result<BigRational, HarnessError> {
    let r = match v.split_once('/') {
        Some((n, d)) => {
            let n: num_bigint::BigInt = parse_one(key, n.trim())?;
            let d: num_bigint::BigInt = parse_one(key, d.trim())?;
            if d == 0.into() {
                return Err(HarnessError::Config(format!("{key}: zero denominator")));
            }
            BigRational::new(n, d)
        }
        None => BigRational::from_integer(parse_one(key, v)?),
    };
    Ok(r)
}

fn fmt_list<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Resolves a raw configuration. `base` anchors relative table paths.
    pub fn from_raw(raw: &RawConfig, base: &Path) -> Result<Self, HarnessError> {
        for (section, keys) in &raw.sections {
            let known = KNOWN.iter().find(|(s, _)| s == section).ok_or_else(|| HarnessError::Config(format!("unknown section [{section}]")))?;
            if let Some(k) = keys.keys().find(|k| !known.1.contains(&k.as_str())) {
                return Err(HarnessError::Config(format!("unknown key {section}.{k}")));
            }
        }
        let get = |s: &str, k: &str| raw.sections.get(s).and_then(|m| m.get(k)).map(String::as_str);
        let name = get("run", "experiment").ok_or_else(|| HarnessError::Config("run.experiment is required".into()))?;
        let experiment = Experiment::parse(name).ok_or_else(|| HarnessError::Config(format!("unknown experiment {name:?}")))?;
        let genus = get("surface", "genus").map(|v| parse_one("surface.genus", v)).transpose()?.unwrap_or(2);
        let punctures = get("surface", "punctures").map(|v| parse_one("surface.punctures", v)).transpose()?.unwrap_or(0);
        let generators = match get("generators", "kind").unwrap_or("humphries") {
            "humphries" => GeneratorChoice::Humphries,
            "torelli" => GeneratorChoice::Torelli(get("generators", "count").map(|v| parse_one("generators.count", v)).transpose()?.unwrap_or(8)),
            "table" => {
                let p = get("generators", "table").ok_or_else(|| HarnessError::Config("generators.table is required for kind = table".into()))?;
                let p = base.join(p);
                if !p.is_file() {
                    return Err(HarnessError::Config(format!("generator table {} does not exist", p.display())));
                }
                GeneratorChoice::Table(p)
            }
            other => return Err(HarnessError::Config(format!("unknown generator kind {other:?}"))),
        };
        let restrict = get("generators", "restrict").map(|v| parse_list("generators.restrict", v)).transpose()?.unwrap_or_default();
        let weights = match get("generators", "weights") {
            Some(v) if !v.trim().is_empty() => v.split(',').map(|x| parse_rational("generators.weights", x.trim())).collect::<Result<_, _>>()?,
            _ => vec![],
        };
        let lengths: Vec<usize> = get("run", "lengths").map(|v| parse_list("run.lengths", v)).transpose()?.unwrap_or_default();
        let samples = get("run", "samples").map(|v| parse_one("run.samples", v)).transpose()?.unwrap_or(100);
        let seed = get("run", "seed").map(|v| parse_one("run.seed", v)).transpose()?.unwrap_or(0);
        let mut budgets = Budgets::for_genus(genus.max(1) as usize);
        if let Some(v) = get("budgets", "max_order") {
            budgets.max_order = parse_one("budgets.max_order", v)?;
        }
        if let Some(v) = get("budgets", "search_bound") {
            budgets.search_bound = parse_one("budgets.search_bound", v)?;
        }
        if let Some(v) = get("budgets", "iterations") {
            budgets.iterations = parse_one("budgets.iterations", v)?;
        }
        if let Some(v) = get("budgets", "threshold") {
            budgets.threshold = parse_rational("budgets.threshold", v)?;
        }
        if let Some(v) = get("budgets", "tolerance") {
            budgets.tolerance = parse_rational("budgets.tolerance", v)?;
        }
        let ball_budget = get("budgets", "ball").map(|v| parse_one("budgets.ball", v)).transpose()?.unwrap_or(DEFAULT_BALL_BUDGET);
        let convolution_budget =
            get("budgets", "convolution").map(|v| parse_one("budgets.convolution", v)).transpose()?.unwrap_or(DEFAULT_CONVOLUTION_BUDGET);
        let mut params = Params::default();
        if let Some(v) = get("params", "k") {
            params.ks = parse_list("params.k", v)?;
        }
        if let Some(v) = get("params", "n_max") {
            params.n_max = parse_one("params.n_max", v)?;
        }
        if let Some(v) = get("params", "sets") {
            params.sets = parse_one("params.sets", v)?;
        }
        if let Some(v) = get("params", "set_size") {
            params.set_size = parse_one("params.set_size", v)?;
        }
        if let Some(v) = get("params", "radius") {
            params.radius = BallRadius::parse(v).ok_or_else(|| HarnessError::Config(format!("params.radius: expected floor or open, got {v:?}")))?;
        }
        if let Some(v) = get("params", "short_len") {
            params.short_len = parse_one("params.short_len", v)?;
        }
        if let Some(v) = get("params", "conjugator_radius") {
            params.conjugator_radius = parse_one("params.conjugator_radius", v)?;
        }
        let out = PathBuf::from(get("run", "out").unwrap_or("out"));
        let workers = get("run", "workers").map(|v| parse_one("run.workers", v)).transpose()?.unwrap_or(0);
        let cfg = ExperimentConfig {
            experiment,
            genus,
            punctures,
            generators,
            restrict,
            weights,
            lengths,
            samples,
            seed,
            budgets,
            ball_budget,
            convolution_budget,
            params,
            out,
            workers,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, HarnessError> {
        Self::from_raw(&RawConfig::parse(text)?, base)
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.experiment != Experiment::ExactLemma {
            if self.lengths.is_empty() {
                return bad("run.lengths must not be empty");
            }
            if self.lengths.windows(2).any(|p| p[0] >= p[1]) {
                return bad("run.lengths must be strictly increasing");
            }
            if self.samples == 0 {
                return bad("run.samples must be at least 1");
            }
        }
        if self.samples > u32::MAX as u64 {
            return bad("run.samples must fit in 32 bits");
        }
        if self.restrict.iter().any(|&i| i == 0) {
            return bad("generators.restrict uses 1-based indices");
        }
        if self.experiment == Experiment::ExactLemma && (self.params.ks.is_empty() || self.params.n_max == 0) {
            return bad("exact_lemma needs params.k and params.n_max >= 1");
        }
        if self.experiment == Experiment::TransienceRk && self.params.ks.is_empty() {
            return bad("transience_rk needs params.k");
        }
        Ok(())
    }

    /// Every field that affects results, one `section.key=value` per line.
    pub fn canonical(&self) -> String {
        let b = &self.budgets;
        let p = &self.params;
        let generators = match &self.generators {
            GeneratorChoice::Humphries => "humphries".to_string(),
            GeneratorChoice::Torelli(n) => format!("torelli:{n}"),
            GeneratorChoice::Table(path) => {
                let text = std::fs::read(path).unwrap_or_default();
                format!("table:{}", hex(&Sha256::digest(&text)))
            }
        };
        [
            format!("run.experiment={}", self.experiment.name()),
            format!("run.seed={}", self.seed),
            format!("run.samples={}", self.samples),
            format!("run.lengths={}", fmt_list(&self.lengths)),
            format!("surface.genus={}", self.genus),
            format!("surface.punctures={}", self.punctures),
            format!("generators.kind={generators}"),
            format!("generators.restrict={}", fmt_list(&self.restrict)),
            format!("generators.weights={}", fmt_list(&self.weights)),
            format!("budgets.max_order={}", b.max_order),
            format!("budgets.search_bound={}", b.search_bound),
            format!("budgets.iterations={}", b.iterations),
            format!("budgets.threshold={}", b.threshold),
            format!("budgets.tolerance={}", b.tolerance),
            format!("budgets.ball={}", self.ball_budget),
            format!("budgets.convolution={}", self.convolution_budget),
            format!("params.k={}", fmt_list(&p.ks)),
            format!("params.n_max={}", p.n_max),
            format!("params.sets={}", p.sets),
            format!("params.set_size={}", p.set_size),
            format!("params.radius={}", p.radius.name()),
            format!("params.short_len={}", p.short_len),
            format!("params.conjugator_radius={}", p.conjugator_radius),
        ]
        .join("\n")
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical`].
    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.canonical().as_bytes()))[..16].to_string()
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let raw = RawConfig::parse("experiment = pa_fraction # trailing\n[surface]\ngenus=3\n; note\n").unwrap();
        assert_eq!(raw.sections["run"]["experiment"], "pa_fraction");
        assert_eq!(raw.sections["surface"]["genus"], "3");
        assert!(RawConfig::parse("[run\n").is_err());
        assert!(RawConfig::parse("novalue\n").is_err());
        assert!(RawConfig::parse("a=1\na=2\n").is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let base = Path::new(".");
        let ok = "experiment=pa_fraction\nlengths=5,10\n";
        assert!(ExperimentConfig::parse(ok, base).is_ok());
        for bad in [
            "experiment=pa_fraction\nlengths=\n",
            "experiment=pa_fraction\nlengths=10,5\n",
            "experiment=pa_fraction\nlengths=5\nsamples=0\n",
            "experiment=nope\nlengths=5\n",
            "experiment=pa_fraction\nlengths=5\n[budgets]\nfoo=1\n",
            "experiment=pa_fraction\nlengths=5\n[extra]\n",
            "experiment=pa_fraction\nlengths=5\n[generators]\nkind=table\ntable=missing.table\n",
            "experiment=pa_fraction\nlengths=5\n[budgets]\nthreshold=1/0\n",
        ] {
            assert!(matches!(ExperimentConfig::parse(bad, base), Err(HarnessError::Config(_))), "{bad}");
        }
    }

    #[test]
    fn hash_ignores_output_and_workers() {
        let base = Path::new(".");
        let a = ExperimentConfig::parse("experiment=pa_fraction\nlengths=5\nout=a\nworkers=1\n", base).unwrap();
        let b = ExperimentConfig::parse("experiment = pa_fraction\n\nlengths = 5\nout = b\nworkers = 8\n", base).unwrap();
        let c = ExperimentConfig::parse("experiment=pa_fraction\nlengths=5\nseed=1\n", base).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 16);
        // Defaults are hashed, so spelling them out changes nothing.
        let d = ExperimentConfig::parse("experiment=pa_fraction\nlengths=5\n[budgets]\nthreshold=2/40\n", base).unwrap();
        assert_eq!(a.hash(), d.hash());
    }
}
