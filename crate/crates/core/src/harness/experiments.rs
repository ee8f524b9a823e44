//! The six experiments. Each one produces JSON sample records and derives
//! its aggregate rows from those records alone, so [`audit`] can recompute
//! them from `samples.jsonl`.

use std::collections::{BTreeMap, HashSet};
use std::time::Duration;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{build_walk, stream_index, Experiment, ExperimentConfig, ExperimentReport, HarnessError};
use crate::classify::{Classifier, PaSource, Verdict};
use crate::curve_graph::{is_k_separated, k_dense_subset, rel_length_proxy, FiniteElementSet, WordBall};
use crate::curves::{ElementKey, MappingClassWord};
use crate::homology::{casson_bleiler, SymplecticMatrix};
use crate::surface::GeneratorSet;
use crate::walk::{convolution_powers, lemma_report, sample_path, sample_rng, StepDistribution};

pub(super) fn dispatch(cfg: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    let (gs, mu) = build_walk(cfg)?;
    let mut r = ExperimentReport {
        experiment: cfg.experiment,
        config_hash: cfg.hash(),
        canonical_config: cfg.canonical(),
        version: env!("CARGO_PKG_VERSION"),
        wall_time: Duration::ZERO,
        header: vec![],
        rows: vec![],
        samples: vec![],
        notes: vec![],
        plot_header: vec![],
        plot: vec![],
        failures: vec![],
    };
    let values = match cfg.experiment {
        Experiment::PaFraction | Experiment::TorelliPaFraction => pa_samples(cfg, &gs, &mu)?,
        Experiment::RelLengthGrowth => rel_length_samples(cfg, &gs, &mu),
        Experiment::ConjugacyBounds => conjugacy_samples(cfg, &gs, &mu)?,
        Experiment::TransienceRk => transience_samples(cfg, &gs, &mu)?,
        Experiment::ExactLemma => lemma_samples(cfg, &gs, &mu)?,
    };
    r.samples = values.iter().map(|v| v.to_string()).collect();
    let agg = aggregate(cfg, &values)?;
    r.header = agg.header;
    r.rows = agg.rows;
    r.notes = agg.notes;
    r.plot_header = agg.plot_header;
    r.plot = agg.plot;
    r.failures = agg.failures;
    Ok(r)
}

struct Aggregate {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    notes: Vec<String>,
    plot_header: Vec<String>,
    plot: Vec<Vec<String>>,
    failures: Vec<String>,
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn f6(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "NaN".to_string()
    }
}

fn aggregate(cfg: &ExperimentConfig, values: &[Value]) -> Result<Aggregate, HarnessError> {
    Ok(match cfg.experiment {
        Experiment::PaFraction | Experiment::TorelliPaFraction => pa_aggregate(cfg, values),
        Experiment::RelLengthGrowth => rel_length_aggregate(cfg, values),
        Experiment::ConjugacyBounds => conjugacy_aggregate(cfg, values),
        Experiment::TransienceRk => transience_aggregate(cfg, values),
        Experiment::ExactLemma => lemma_aggregate(cfg, values),
    })
}

/// Recomputes the aggregate rows from `samples.jsonl` and compares them with
/// `aggregate.csv`.
pub fn audit(cfg: &ExperimentConfig, aggregate_csv: &str, samples_jsonl: &str) -> Result<(), String> {
    let values: Vec<Value> = samples_jsonl.lines().map(serde_json::from_str).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let hash = cfg.hash();
    if let Some(v) = values.iter().find(|v| v["config_hash"] != hash.as_str()) {
        return Err(format!("sample from another config: {v}"));
    }
    let agg = aggregate(cfg, &values).map_err(|e| e.to_string())?;
    let mut expect = format!("config_hash,{}\n", agg.header.join(","));
    for row in &agg.rows {
        expect.push_str(&format!("{hash},{}\n", row.join(",")));
    }
    if expect == aggregate_csv {
        Ok(())
    } else {
        Err("aggregate rows differ from the recomputation".to_string())
    }
}

fn jobs(cfg: &ExperimentConfig) -> Vec<(usize, usize, u64)> {
    cfg.lengths.iter().enumerate().flat_map(|(pos, &n)| (0..cfg.samples).map(move |i| (pos, n, i))).collect()
}

fn as_u64(v: &Value) -> u64 {
    v.as_u64().unwrap_or(0)
}

fn as_bool(v: &Value) -> bool {
    v.as_bool().unwrap_or(false)
}

/// Lower median.
fn median(mut v: Vec<u64>) -> Option<u64> {
    v.sort_unstable();
    v.get(v.len().saturating_sub(1) / 2).copied()
}

// ---------------------------------------------------------------------------
// pa_fraction and torelli_pa_fraction

fn pa_samples(cfg: &ExperimentConfig, gs: &GeneratorSet, mu: &StepDistribution) -> Result<Vec<Value>, HarnessError> {
    let cl = Classifier::new(gs, cfg.budgets.clone());
    let hash = cfg.hash();
    Ok(jobs(cfg)
        .into_par_iter()
        .map(|(pos, n, i)| {
            let index = stream_index(pos, i);
            let s = sample_path(mu, n, cfg.seed, index);
            let w = s.word();
            let m = gs.matrix(w);
            let homology = casson_bleiler(&m).is_certified();
            let c = cl.classify(w);
            let growth = match c.verdict.source() {
                Some(PaSource::Growth) => true,
                Some(_) => cl.growth_verdict(w, true).is_some_and(|g| g.positive),
                None => false,
            };
            let lambda = match &c.verdict {
                Verdict::PseudoAnosov { dilatation: Some(l), .. } => json!(l.to_string()),
                _ => Value::Null,
            };
            json!({
                "config_hash": hash,
                "n": n,
                "index": index,
                "seed": cfg.seed,
                "word": gs.format_word(w),
                "verdict": c.verdict.name(),
                "source": c.verdict.source().map(|s| s.name()),
                "homology": homology,
                "growth": growth,
                "identity_homology": m.is_identity(),
                "witness": c.witness,
                "lambda": lambda,
            })
        })
        .collect())
}

/// Binomial proportion with its standard error.
fn proportion(count: u64, total: u64) -> (f64, f64) {
    if total == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = count as f64 / total as f64;
    (p, (p * (1.0 - p) / total as f64).sqrt())
}

/// Trend of a sequence of binomial proportions `(p, σ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrendReport {
    /// The last proportion strictly exceeds the first.
    pub increased: bool,
    /// Every consecutive pair satisfies `p_{i+1} + 2σ_{i+1} >= p_i - 2σ_i`.
    pub nondecreasing_within_2sigma: bool,
}

impl TrendReport {
    pub fn pass(&self) -> bool {
        self.increased && self.nondecreasing_within_2sigma
    }
}

pub fn trend_check(points: &[(f64, f64)]) -> TrendReport {
    let increased = match (points.first(), points.last()) {
        (Some(a), Some(b)) => b.0 > a.0,
        _ => false,
    };
    let nondecreasing_within_2sigma = points.windows(2).all(|p| p[1].0 + 2.0 * p[1].1 >= p[0].0 - 2.0 * p[0].1);
    TrendReport { increased, nondecreasing_within_2sigma }
}

fn pa_aggregate(cfg: &ExperimentConfig, values: &[Value]) -> Aggregate {
    let torelli = cfg.experiment == Experiment::TorelliPaFraction;
    let header = strings(&[
        "n",
        "samples",
        "certified_pa_count",
        "homology_only_count",
        "growth_only_count",
        "both_count",
        "penner_only_count",
        "periodic_count",
        "reducible_count",
        "unknown_count",
        "identity_homology_count",
        "fraction",
        "sigma",
        "lower",
        "upper",
        "growth_fraction",
        "growth_sigma",
    ]);
    let mut rows = vec![];
    let mut plot = vec![];
    let mut points = vec![];
    let mut growth_points = vec![];
    let mut failures = vec![];
    for &n in &cfg.lengths {
        let group: Vec<&Value> = values.iter().filter(|v| as_u64(&v["n"]) == n as u64).collect();
        let total = group.len() as u64;
        let count = |f: &dyn Fn(&Value) -> bool| group.iter().filter(|v| f(v)).count() as u64;
        let pa = count(&|v| v["verdict"] == "pseudo_anosov");
        let h_only = count(&|v| as_bool(&v["homology"]) && !as_bool(&v["growth"]));
        let g_only = count(&|v| as_bool(&v["growth"]) && !as_bool(&v["homology"]));
        let both = count(&|v| as_bool(&v["growth"]) && as_bool(&v["homology"]));
        let penner = count(&|v| v["source"] == "penner_form" && !as_bool(&v["growth"]) && !as_bool(&v["homology"]));
        let periodic = count(&|v| v["verdict"] == "periodic");
        let reducible = count(&|v| v["verdict"] == "reducible");
        let unknown = count(&|v| v["verdict"] == "unknown");
        let identity = count(&|v| as_bool(&v["identity_homology"]));
        let growth = g_only + both;
        let (p, sigma) = proportion(pa, total);
        let (gp, gsigma) = proportion(growth, total);
        points.push((p, sigma));
        growth_points.push((gp, gsigma));
        let lower = (p - 2.0 * sigma).max(0.0);
        let upper = (p + 2.0 * sigma).min(1.0);
        rows.push(vec![
            n.to_string(),
            total.to_string(),
            pa.to_string(),
            h_only.to_string(),
            g_only.to_string(),
            both.to_string(),
            penner.to_string(),
            periodic.to_string(),
            reducible.to_string(),
            unknown.to_string(),
            identity.to_string(),
            f6(p),
            f6(sigma),
            f6(lower),
            f6(upper),
            f6(gp),
            f6(gsigma),
        ]);
        plot.push(vec![n.to_string(), f6(p), f6(lower), f6(upper), f6(gp)]);
        if torelli {
            if identity != total {
                failures.push(format!("n={n}: {} sampled locations have nonidentity homology", total - identity));
            }
            let h = count(&|v| v["source"] == "homology");
            if h > 0 {
                failures.push(format!("n={n}: {h} Torelli samples certified by homology"));
            }
        }
    }
    let t = trend_check(&points);
    let gt = trend_check(&growth_points);
    let notes = vec![
        "note: the certified fraction is a lower bound for the pseudo-Anosov fraction; uncertified samples may still be pseudo-Anosov".to_string(),
        format!("trend_certified: increased={} nondecreasing_within_2sigma={}", t.increased, t.nondecreasing_within_2sigma),
        format!("trend_growth: increased={} nondecreasing_within_2sigma={}", gt.increased, gt.nondecreasing_within_2sigma),
    ];
    Aggregate { header, rows, notes, plot_header: strings(&["n", "fraction", "lower", "upper", "growth_fraction"]), plot, failures }
}

// ---------------------------------------------------------------------------
// rel_length_growth

fn rel_length_samples(cfg: &ExperimentConfig, gs: &GeneratorSet, mu: &StepDistribution) -> Vec<Value> {
    let hash = cfg.hash();
    jobs(cfg)
        .into_par_iter()
        .map(|(pos, n, i)| {
            let index = stream_index(pos, i);
            let s = sample_path(mu, n, cfg.seed, index);
            let p = rel_length_proxy(gs, s.word());
            json!({
                "config_hash": hash,
                "n": n,
                "index": index,
                "seed": cfg.seed,
                "word": gs.format_word(s.word()),
                "lower": p.lower,
                "upper": p.upper,
                "tags": p.tags.iter().map(|t| t.name()).collect::<Vec<_>>(),
            })
        })
        .collect()
}

fn opt_str(v: Option<u64>) -> String {
    v.map_or_else(|| "inf".to_string(), |x| x.to_string())
}

fn rel_length_aggregate(cfg: &ExperimentConfig, values: &[Value]) -> Aggregate {
    let header = strings(&["n", "samples", "median_lower", "median_upper", "max_upper", "mean_lower"]);
    let mut rows = vec![];
    let mut plot = vec![];
    let mut medians = vec![];
    let mut overall_max: Option<u64> = Some(0);
    for &n in &cfg.lengths {
        let group: Vec<&Value> = values.iter().filter(|v| as_u64(&v["n"]) == n as u64).collect();
        let lowers: Vec<u64> = group.iter().map(|v| as_u64(&v["lower"])).collect();
        // A missing upper bound sorts last.
        let uppers: Vec<u64> = group.iter().map(|v| v["upper"].as_u64().unwrap_or(u64::MAX)).collect();
        let ml = median(lowers.clone());
        let mu = median(uppers.clone()).filter(|&x| x != u64::MAX);
        let mx = uppers.iter().max().copied().filter(|&x| x != u64::MAX);
        let mx = if group.is_empty() { Some(0) } else { mx };
        overall_max = match (overall_max, mx) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        let mean = if lowers.is_empty() { f64::NAN } else { lowers.iter().sum::<u64>() as f64 / lowers.len() as f64 };
        medians.push(ml.unwrap_or(0));
        rows.push(vec![n.to_string(), group.len().to_string(), opt_str(ml), opt_str(mu), opt_str(mx), f6(mean)]);
        let nan = |x: Option<u64>| x.map_or_else(|| "NaN".to_string(), |x| x.to_string());
        plot.push(vec![n.to_string(), nan(ml), nan(mu), nan(mx), f6(mean)]);
    }
    let nondecreasing = medians.windows(2).all(|p| p[1] >= p[0]);
    let notes = vec![
        "note: the proxy bounds the curve-graph distance between c_1 and w(c_1); it is not the relative word length".to_string(),
        format!("max_upper_overall: {}", opt_str(overall_max)),
        format!("median_lower_nondecreasing: {nondecreasing}"),
    ];
    Aggregate { header, rows, notes, plot_header: strings(&["n", "median_lower", "median_upper", "max_upper", "mean_lower"]), plot, failures: vec![] }
}

// ---------------------------------------------------------------------------
// conjugacy_bounds

/// Stream bit that separates the short word from the conjugator.
const SHORT_STREAM: u64 = 1 << 63;

fn conjugacy_samples(cfg: &ExperimentConfig, gs: &GeneratorSet, mu: &StepDistribution) -> Result<Vec<Value>, HarnessError> {
    let hash = cfg.hash();
    let ball = WordBall::new(gs, cfg.params.conjugator_radius, cfg.ball_budget)?;
    let mats: Vec<(SymplecticMatrix, SymplecticMatrix)> = ball
        .elements()
        .par_iter()
        .map(|(_, v)| {
            let m = gs.matrix(v);
            let inv = m.symplectic_inverse();
            (m, inv)
        })
        .collect();
    Ok(jobs(cfg)
        .into_par_iter()
        .map(|(pos, n, i)| {
            let index = stream_index(pos, i);
            let s = sample_path(mu, cfg.params.short_len, cfg.seed, index | SHORT_STREAM).word().clone();
            let u = sample_path(mu, n, cfg.seed, index).word().clone();
            let b = s.conjugate_by(&u);
            let ms = gs.matrix(&s);
            let mb = gs.matrix(&b);
            let kb = gs.element_key(&b);
            let pa = rel_length_proxy(gs, &s);
            let pb = rel_length_proxy(gs, &b);
            // Minimal (upper, lower, word length) over conjugators in the ball.
            let mut best: Option<((u64, u32, usize), MappingClassWord)> = None;
            for ((key, v), (m, inv)) in ball.elements().iter().zip(&mats) {
                if m.mul(&ms).mul(inv) != mb || gs.element_key(&s.conjugate_by(v)) != kb {
                    continue;
                }
                let p = rel_length_proxy(gs, v);
                let rank = (p.upper.map_or(u64::MAX, u64::from), p.lower, ball.distance(key).unwrap_or(usize::MAX));
                if best.as_ref().map_or(true, |(r, _)| rank < *r) {
                    best = Some((rank, v.clone()));
                }
            }
            let (v_word, v_upper, v_lower) = match &best {
                Some(((up, low, _), v)) => (json!(gs.format_word(v)), json!(if *up == u64::MAX { None } else { Some(*up) }), json!(low)),
                None => (Value::Null, Value::Null, Value::Null),
            };
            json!({
                "config_hash": hash,
                "n": n,
                "index": index,
                "seed": cfg.seed,
                "s": gs.format_word(&s),
                "u": gs.format_word(&u),
                "b": gs.format_word(&b),
                "proxy_a_upper": pa.upper,
                "proxy_b_upper": pb.upper,
                "found": best.is_some(),
                "v": v_word,
                "proxy_v_upper": v_upper,
                "proxy_v_lower": v_lower,
                "b_word_length": b.len(),
                "triangle_ok": b.len() <= 2 * u.len() + s.len(),
            })
        })
        .collect())
}

fn conjugacy_aggregate(cfg: &ExperimentConfig, values: &[Value]) -> Aggregate {
    let header = strings(&["n", "samples", "found_count", "mean_sum_ab", "mean_min_proxy_v", "k_emp", "unbounded_count", "triangle_failures"]);
    let mut rows = vec![];
    let mut plot = vec![];
    let mut failures = vec![];
    let mut k_all = f64::NAN;
    for &n in &cfg.lengths {
        let group: Vec<&Value> = values.iter().filter(|v| as_u64(&v["n"]) == n as u64).collect();
        let found: Vec<&&Value> = group.iter().filter(|v| as_bool(&v["found"]) && v["proxy_v_upper"].is_u64()).collect();
        let mut sum_ab = 0.0;
        let mut sum_v = 0.0;
        let mut k_emp = f64::NAN;
        let mut unbounded = 0;
        for v in &found {
            let (a, b) = (v["proxy_a_upper"].as_u64(), v["proxy_b_upper"].as_u64());
            let pv = as_u64(&v["proxy_v_upper"]) as f64;
            sum_v += pv;
            if let (Some(a), Some(b)) = (a, b) {
                let s = (a + b) as f64;
                sum_ab += s;
                plot.push(vec![f6(s), f6(pv), n.to_string()]);
                if s > 0.0 {
                    k_emp = if k_emp.is_nan() { pv / s } else { k_emp.max(pv / s) };
                } else if pv > 0.0 {
                    unbounded += 1;
                }
            }
        }
        if !k_emp.is_nan() {
            k_all = if k_all.is_nan() { k_emp } else { k_all.max(k_emp) };
        }
        let tri = group.iter().filter(|v| !as_bool(&v["triangle_ok"])).count();
        if tri > 0 {
            failures.push(format!("n={n}: {tri} samples violate |u s u^-1| <= 2|u| + |s|"));
        }
        let nf = found.len() as f64;
        rows.push(vec![
            n.to_string(),
            group.len().to_string(),
            found.len().to_string(),
            f6(if nf > 0.0 { sum_ab / nf } else { f64::NAN }),
            f6(if nf > 0.0 { sum_v / nf } else { f64::NAN }),
            f6(k_emp),
            unbounded.to_string(),
            tri.to_string(),
        ]);
    }
    let notes = vec![
        format!("conjugator_radius: {}", cfg.params.conjugator_radius),
        "note: proxies are the upper curve-graph bounds of c_1 against its image; conjugators outside the radius are not seen".to_string(),
        format!("k_emp_overall: {}", f6(k_all)),
    ];
    Aggregate { header, rows, notes, plot_header: strings(&["sum_proxy_ab", "min_proxy_v", "n"]), plot, failures }
}

// ---------------------------------------------------------------------------
// transience_rk

fn transience_samples(cfg: &ExperimentConfig, gs: &GeneratorSet, mu: &StepDistribution) -> Result<Vec<Value>, HarnessError> {
    if cfg.lengths.first() == Some(&0) {
        return Err(HarnessError::Config("transience_rk needs lengths >= 1".into()));
    }
    let hash = cfg.hash();
    let n_max = *cfg.lengths.last().unwrap();
    let cl = Classifier::new(gs, cfg.budgets.clone());
    // Locations, keys and certificates along each path.
    let paths: Vec<(Vec<MappingClassWord>, Vec<ElementKey>, Vec<bool>)> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let s = sample_path(mu, n_max, cfg.seed, i);
            let mut w = MappingClassWord::identity();
            let mut words = vec![];
            for &step in &s.steps {
                w = w.concat(&mu.support()[step]);
                words.push(w.clone());
            }
            let keys = words.iter().map(|w| gs.element_key(w)).collect();
            let certified = words.iter().map(|w| cl.classify(w).verdict.is_pseudo_anosov()).collect();
            (words, keys, certified)
        })
        .collect();
    let mut r = FiniteElementSet::default();
    for (words, _, certified) in &paths {
        for (w, c) in words.iter().zip(certified) {
            if !c {
                r.insert(gs, w.clone());
            }
        }
    }
    let mut ks = cfg.params.ks.clone();
    ks.sort_unstable();
    ks.dedup();
    let dense: Vec<HashSet<ElementKey>> =
        ks.iter().map(|&k| Ok(k_dense_subset(gs, &r, k, cfg.ball_budget)?.keys().iter().cloned().collect())).collect::<Result<_, HarnessError>>()?;
    let rkeys: HashSet<&ElementKey> = r.keys().iter().collect();
    Ok(paths
        .iter()
        .enumerate()
        .map(|(i, (words, keys, certified))| {
            let in_r: Vec<bool> = keys.iter().map(|k| rkeys.contains(k)).collect();
            let per_k: BTreeMap<String, Vec<bool>> =
                ks.iter().zip(&dense).map(|(k, d)| (k.to_string(), keys.iter().map(|key| d.contains(key)).collect())).collect();
            json!({
                "config_hash": hash,
                "index": i,
                "seed": cfg.seed,
                "n": n_max,
                "word": gs.format_word(words.last().unwrap_or(&MappingClassWord::identity())),
                "certified": certified,
                "in_r": in_r,
                "in_r_k": per_k,
                "r_size": r.len(),
                "r_k_sizes": ks.iter().zip(&dense).map(|(k, d)| (k.to_string(), d.len())).collect::<BTreeMap<_, _>>(),
            })
        })
        .collect())
}

fn bools(v: &Value) -> Vec<bool> {
    v.as_array().map(|a| a.iter().map(as_bool).collect()).unwrap_or_default()
}

fn transience_aggregate(cfg: &ExperimentConfig, values: &[Value]) -> Aggregate {
    let header = strings(&["n", "k", "paths", "r_size", "r_k_size", "mean_r_hits", "mean_dense_hits", "mean_separated_hits", "r_frequency", "separated_frequency"]);
    let mut ks = cfg.params.ks.clone();
    ks.sort_unstable();
    ks.dedup();
    let mut rows = vec![];
    let mut plot = vec![];
    let mut failures = vec![];
    let r_size = values.first().map_or(0, |v| as_u64(&v["r_size"]));
    for pair in ks.windows(2) {
        for v in values {
            let (a, b) = (bools(&v["in_r_k"][pair[0].to_string()]), bools(&v["in_r_k"][pair[1].to_string()]));
            if a.iter().zip(&b).any(|(x, y)| *x && !*y) {
                failures.push(format!("sample {}: R_{} is not contained in R_{}", v["index"], pair[0], pair[1]));
            }
        }
    }
    for &n in &cfg.lengths {
        for &k in &ks {
            let paths = values.len() as f64;
            let (mut r_hits, mut dense_hits) = (0u64, 0u64);
            for v in values {
                let in_r = bools(&v["in_r"]);
                let in_d = bools(&v["in_r_k"][k.to_string()]);
                r_hits += in_r.iter().take(n).filter(|x| **x).count() as u64;
                dense_hits += in_d.iter().take(n).filter(|x| **x).count() as u64;
            }
            let sep = r_hits - dense_hits;
            let mean = |x: u64| if paths > 0.0 { x as f64 / paths } else { f64::NAN };
            let rk_size = values.first().map_or(0, |v| as_u64(&v["r_k_sizes"][k.to_string()]));
            rows.push(vec![
                n.to_string(),
                k.to_string(),
                values.len().to_string(),
                r_size.to_string(),
                rk_size.to_string(),
                f6(mean(r_hits)),
                f6(mean(dense_hits)),
                f6(mean(sep)),
                f6(mean(r_hits) / n as f64),
                f6(mean(sep) / n as f64),
            ]);
            plot.push(vec![n.to_string(), k.to_string(), f6(mean(r_hits) / n as f64), f6(mean(sep) / n as f64)]);
        }
    }
    let notes = vec!["note: R is the finite set of sampled locations without a pseudo-Anosov certificate, a proxy for an infinite set".to_string()];
    Aggregate { header, rows, notes, plot_header: strings(&["n", "k", "r_frequency", "separated_frequency"]), plot, failures }
}

// ---------------------------------------------------------------------------
// exact_lemma

fn lemma_samples(cfg: &ExperimentConfig, gs: &GeneratorSet, mu: &StepDistribution) -> Result<Vec<Value>, HarnessError> {
    let hash = cfg.hash();
    let p = &cfg.params;
    let powers = convolution_powers(gs, mu, p.n_max, cfg.convolution_budget)?;
    let mut ks = p.ks.clone();
    ks.sort_unstable();
    ks.dedup();
    // Balls for the greedy separation test and for the inequality.
    let mut balls = BTreeMap::new();
    for &k in &ks {
        let sep = WordBall::new(gs, k.saturating_sub(1), cfg.ball_budget)?;
        let rad = WordBall::new(gs, p.radius.radius(k), cfg.ball_budget)?;
        balls.insert(k, (sep, rad));
    }
    let mut cells = vec![];
    for &k in &ks {
        for n in 1..=p.n_max {
            for m in 0..n {
                for s in 0..p.sets as u64 {
                    cells.push((k, m, n, s));
                }
            }
        }
    }
    let records: Vec<Result<Value, HarnessError>> = cells
        .into_par_iter()
        .map(|(k, m, n, s)| {
            let (sep, rad) = &balls[&k];
            let stream = ((k as u64) << 48) | ((m as u64) << 40) | ((n as u64) << 32) | s;
            let mut rng = sample_rng(cfg.seed, stream);
            let size = rng.gen_range(0..=p.set_size);
            let mut candidates: Vec<&MappingClassWord> = powers[n].atoms().map(|(_, _, w)| w).collect();
            candidates.shuffle(&mut rng);
            let mut chosen: Vec<MappingClassWord> = vec![];
            for c in candidates {
                if chosen.len() >= size {
                    break;
                }
                let close = k > 0 && chosen.iter().any(|x| sep.contains_within(&gs.element_key(&x.inverse().concat(c)), k - 1));
                if !close {
                    chosen.push(c.clone());
                }
            }
            let x = FiniteElementSet::new(gs, chosen);
            if !is_k_separated(gs, &x, k, cfg.ball_budget)? {
                return Err(HarnessError::Invariant(format!("generated set for k={k} m={m} n={n} #{s} is not separated")));
            }
            let rep = lemma_report(&x, k, m, n, &powers[m], &powers[n], rad);
            let mut v = rep.json();
            let obj = v.as_object_mut().unwrap();
            obj.insert("config_hash".into(), json!(hash));
            obj.insert("set_index".into(), json!(s));
            obj.insert("seed".into(), json!(cfg.seed));
            obj.insert("convention".into(), json!(p.radius.name()));
            obj.insert("set".into(), json!(x.words().iter().map(|w| gs.format_word(w)).collect::<Vec<_>>()));
            Ok(v)
        })
        .collect();
    records.into_iter().collect()
}

fn rational(v: &Value) -> BigRational {
    let s = v.as_str().unwrap_or("0");
    match s.split_once('/') {
        Some((a, b)) => BigRational::new(a.parse().unwrap_or_default(), b.parse().unwrap_or_else(|_| 1.into())),
        None => BigRational::from_integer(s.parse().unwrap_or_default()),
    }
}

fn lemma_aggregate(cfg: &ExperimentConfig, values: &[Value]) -> Aggregate {
    let header = strings(&["k", "m", "n", "radius", "sets", "failures", "max_excess", "mean_set_size"]);
    let mut groups: BTreeMap<(u64, u64, u64), Vec<&Value>> = BTreeMap::new();
    for v in values {
        groups.entry((as_u64(&v["k"]), as_u64(&v["m"]), as_u64(&v["n"]))).or_default().push(v);
    }
    let mut rows = vec![];
    let mut plot = vec![];
    let mut failures = vec![];
    for ((k, m, n), group) in &groups {
        let fails: Vec<&&Value> = group.iter().filter(|v| !as_bool(&v["pass"])).collect();
        let max_excess = group.iter().map(|v| rational(&v["lhs"]) - rational(&v["rhs"])).max().unwrap_or_else(BigRational::zero);
        let mean_size = group.iter().map(|v| as_u64(&v["set_size"])).sum::<u64>() as f64 / group.len() as f64;
        let radius = group.first().map_or(0, |v| as_u64(&v["radius"]));
        if let Some(v) = fails.first() {
            failures.push(format!(
                "k={k} m={m} n={n}: {} of {} sets violate the inequality, e.g. X={} lhs={} rhs={}",
                fails.len(),
                group.len(),
                v["set"],
                v["lhs"].as_str().unwrap_or(""),
                v["rhs"].as_str().unwrap_or("")
            ));
        }
        rows.push(vec![
            k.to_string(),
            m.to_string(),
            n.to_string(),
            radius.to_string(),
            group.len().to_string(),
            fails.len().to_string(),
            max_excess.to_string(),
            format!("{mean_size:.3}"),
        ]);
        plot.push(vec![k.to_string(), m.to_string(), n.to_string(), fails.len().to_string(), f6(max_excess.to_f64().unwrap_or(f64::NAN))]);
    }
    let total: usize = rows.iter().map(|r| r[5].parse::<usize>().unwrap_or(0)).sum();
    let notes = vec![
        format!("radius_convention: {} (floor = k/2 rounded down, open = largest r with 2r < k)", cfg.params.radius.name()),
        format!("total_failures: {total}"),
    ];
    Aggregate { header, rows, notes, plot_header: strings(&["k", "m", "n", "failures", "max_excess"]), plot, failures }
}
