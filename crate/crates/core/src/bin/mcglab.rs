use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mcglab::harness::{run_experiment, Experiment, ExperimentConfig, HarnessError, RawConfig};

#[derive(Parser)]
#[command(name = "mcglab", version, about = "Random walks on mapping class groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified pseudo-Anosov fraction along a walk.
    #[command(name = "pa_fraction")]
    PaFraction(Flags),
    /// Growth-certified fraction along a Torelli walk.
    #[command(name = "torelli_pa_fraction")]
    TorelliPaFraction(Flags),
    /// Curve-graph proxy of w_n(c_1) along a walk.
    #[command(name = "rel_length_growth")]
    RelLengthGrowth(Flags),
    /// Shortest conjugators within a word ball.
    #[command(name = "conjugacy_bounds")]
    ConjugacyBounds(Flags),
    /// Hits of uncertified locations and their k-separated part.
    #[command(name = "transience_rk")]
    TransienceRk(Flags),
    /// Exact separated-set inequality sweep.
    #[command(name = "exact_lemma")]
    ExactLemma(Flags),
}

#[derive(Args)]
struct Flags {
    /// Config file; the built-in default is used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    samples: Option<u64>,
    /// Comma-separated length grid.
    #[arg(long)]
    lengths: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    /// Budget override `key=value`, repeatable (max_order, search_bound,
    /// iterations, threshold, tolerance, ball, convolution).
    #[arg(long = "budget", value_name = "KEY=VALUE")]
    budgets: Vec<String>,
}

fn default_config(e: Experiment) -> &'static str {
    match e {
        Experiment::PaFraction => include_str!("../../configs/pa_fraction.conf"),
        Experiment::TorelliPaFraction => include_str!("../../configs/torelli_pa_fraction.conf"),
        Experiment::RelLengthGrowth => include_str!("../../configs/rel_length_growth.conf"),
        Experiment::ConjugacyBounds => include_str!("../../configs/conjugacy_bounds.conf"),
        Experiment::TransienceRk => include_str!("../../configs/transience_rk.conf"),
        Experiment::ExactLemma => include_str!("../../configs/exact_lemma.conf"),
    }
}

fn load(e: Experiment, f: &Flags) -> Result<ExperimentConfig, HarnessError> {
    let (text, base) = match &f.config {
        Some(p) => (
            std::fs::read_to_string(p).map_err(|err| HarnessError::Config(format!("{}: {err}", p.display())))?,
            p.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None => (default_config(e).to_string(), PathBuf::from(".")),
    };
    let mut raw = RawConfig::parse(&text)?;
    match raw.sections.get("run").and_then(|r| r.get("experiment")) {
        Some(name) if name != e.name() => {
            return Err(HarnessError::Config(format!("config is for {name}, not {}", e.name())));
        }
        _ => raw.set("run", "experiment", e.name()),
    }
    if let Some(s) = f.seed {
        raw.set("run", "seed", &s.to_string());
    }
    if let Some(n) = f.samples {
        raw.set("run", "samples", &n.to_string());
    }
    if let Some(l) = &f.lengths {
        raw.set("run", "lengths", l);
    }
    if let Some(w) = f.workers {
        raw.set("run", "workers", &w.to_string());
    }
    if let Some(o) = &f.out {
        raw.set("run", "out", &o.to_string_lossy());
    }
    for b in &f.budgets {
        let (k, v) = b.split_once('=').ok_or_else(|| HarnessError::Config(format!("--budget expects key=value, got {b:?}")))?;
        raw.set("budgets", k.trim(), v.trim());
    }
    ExperimentConfig::from_raw(&raw, &base)
}

fn run(e: Experiment, f: &Flags) -> Result<i32, HarnessError> {
    let cfg = load(e, f)?;
    let report = run_experiment(&cfg)?;
    let dir = report.write(&cfg.out)?;
    println!("{}", dir.display());
    for line in &report.failures {
        eprintln!("invariant failure: {line}");
    }
    Ok(if report.failures.is_empty() { 0 } else { 4 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (e, flags) = match &cli.command {
        Command::PaFraction(f) => (Experiment::PaFraction, f),
        Command::TorelliPaFraction(f) => (Experiment::TorelliPaFraction, f),
        Command::RelLengthGrowth(f) => (Experiment::RelLengthGrowth, f),
        Command::ConjugacyBounds(f) => (Experiment::ConjugacyBounds, f),
        Command::TransienceRk(f) => (Experiment::TransienceRk, f),
        Command::ExactLemma(f) => (Experiment::ExactLemma, f),
    };
    let code = run(e, flags).unwrap_or_else(|err| {
        eprintln!("mcglab: {err}");
        err.exit_code()
    });
    ExitCode::from(code as u8)
}
