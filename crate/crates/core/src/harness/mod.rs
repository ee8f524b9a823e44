//! Experiment runner: configuration, seeded batches and result files.
//!
//! Every run writes `out/<experiment>/<config-hash>/` with `summary.txt`,
//! `aggregate.csv`, `samples.jsonl` and `plot.dat`. Sample records and
//! aggregate rows depend only on the configuration, never on timing or on
//! the number of workers.

pub mod config;
mod experiments;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::curve_graph::CurveGraphError;
use crate::surface::{humphries_generators, make_surface, torelli_generators, GeneratorSet, SurfaceError};
use crate::walk::{make_step_distribution, StepDistribution, WalkError};

pub use config::{Experiment, ExperimentConfig, GeneratorChoice, Params, RawConfig};
pub use experiments::{audit, trend_check, TrendReport};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("budget error: {0}")]
    Budget(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// 2 for configuration, 3 for budgets, 4 for invariants, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Budget(_) => 3,
            HarnessError::Invariant(_) => 4,
            HarnessError::Io(_) => 1,
        }
    }
}

impl From<WalkError> for HarnessError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::BudgetExceeded { .. } | WalkError::Graph(CurveGraphError::BudgetExceeded { .. }) => HarnessError::Budget(e.to_string()),
            WalkError::Precondition(_) | WalkError::Graph(_) => HarnessError::Invariant(e.to_string()),
            _ => HarnessError::Config(e.to_string()),
        }
    }
}

impl From<CurveGraphError> for HarnessError {
    fn from(e: CurveGraphError) -> Self {
        match e {
            CurveGraphError::BudgetExceeded { .. } => HarnessError::Budget(e.to_string()),
            _ => HarnessError::Invariant(e.to_string()),
        }
    }
}

impl From<SurfaceError> for HarnessError {
    fn from(e: SurfaceError) -> Self {
        HarnessError::Config(e.to_string())
    }
}

/// Results of one run. Only `wall_time` varies between reruns.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub config_hash: String,
    pub canonical_config: String,
    pub version: &'static str,
    pub wall_time: Duration,
    /// Column names, without the leading `config_hash` column.
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// One JSON object per line.
    pub samples: Vec<String>,
    /// Extra summary lines.
    pub notes: Vec<String>,
    pub plot_header: Vec<String>,
    pub plot: Vec<Vec<String>>,
    /// Violated invariants; a nonempty list means exit code 4.
    pub failures: Vec<String>,
}

impl ExperimentReport {
    pub fn aggregate_csv(&self) -> String {
        let mut out = format!("config_hash,{}\n", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{},{}", self.config_hash, row.join(","));
        }
        out
    }

    pub fn samples_jsonl(&self) -> String {
        self.samples.iter().map(|l| format!("{l}\n")).collect()
    }

    pub fn plot_dat(&self) -> String {
        let mut out = format!("# config_hash {}\n# {}\n", self.config_hash, self.plot_header.join(" "));
        for row in &self.plot {
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "experiment: {}", self.experiment.name());
        let _ = writeln!(out, "config_hash: {}", self.config_hash);
        let _ = writeln!(out, "code_version: mcglab {}", self.version);
        let _ = writeln!(out, "wall_time_s: {:.3}", self.wall_time.as_secs_f64());
        let _ = writeln!(out, "status: {}", if self.failures.is_empty() { "ok" } else { "INVARIANT FAILURE" });
        for n in &self.notes {
            let _ = writeln!(out, "{n}");
        }
        for f in &self.failures {
            let _ = writeln!(out, "failure: {f}");
        }
        let _ = writeln!(out, "\n[aggregate]\n{}", self.aggregate_csv().trim_end());
        let _ = writeln!(out, "\n[config]\n{}", self.canonical_config);
        out
    }

    /// Writes the four files and returns their directory.
    pub fn write(&self, out: &Path) -> Result<PathBuf, HarnessError> {
        let dir = out.join(self.experiment.name()).join(&self.config_hash);
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("summary.txt"), self.summary())?;
        std::fs::write(dir.join("aggregate.csv"), self.aggregate_csv())?;
        std::fs::write(dir.join("samples.jsonl"), self.samples_jsonl())?;
        std::fs::write(dir.join("plot.dat"), self.plot_dat())?;
        Ok(dir)
    }
}

/// The generator set and step distribution of a configuration.
pub fn build_walk(cfg: &ExperimentConfig) -> Result<(GeneratorSet, StepDistribution), HarnessError> {
    let s = make_surface(cfg.genus, cfg.punctures)?;
    let mut gs = match &cfg.generators {
        GeneratorChoice::Humphries => humphries_generators(&s)?,
        GeneratorChoice::Torelli(n) => torelli_generators(&s, *n)?,
        GeneratorChoice::Table(path) => GeneratorSet::from_table(&s, &std::fs::read_to_string(path)?)?,
    };
    if !cfg.restrict.is_empty() {
        if let Some(i) = cfg.restrict.iter().find(|&&i| i > gs.len()) {
            return Err(HarnessError::Config(format!("generators.restrict index {i} exceeds {}", gs.len())));
        }
        let idx: Vec<usize> = cfg.restrict.iter().map(|i| i - 1).collect();
        gs = gs.restrict(&idx);
    }
    let weights = if cfg.weights.is_empty() { None } else { Some(cfg.weights.as_slice()) };
    let mu = make_step_distribution(&gs, weights).map_err(|e| HarnessError::Config(e.to_string()))?;
    Ok((gs, mu))
}

/// Runs the configured experiment on a pool of `cfg.workers` threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut report = pool.install(|| experiments::dispatch(cfg))?;
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Sample stream index for sample `i` at grid position `pos`.
pub fn stream_index(pos: usize, i: u64) -> u64 {
    ((pos as u64) << 32) | i
}
