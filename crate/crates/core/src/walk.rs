//! Random walks: step distributions, seeded sample paths and exact
//! convolution powers on canonical element keys.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::curve_graph::{is_k_separated, CurveGraphError, FiniteElementSet, WordBall};
use crate::curves::{ElementKey, Letter, MappingClassWord};
use crate::surface::GeneratorSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("step distribution has empty support")]
    EmptySupport,
    #[error("weight {0} is not positive")]
    NonpositiveWeight(String),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("common denominator of the masses exceeds 2^63")]
    DenominatorTooLarge,
    #[error("exact convolution needs {required} step sequences, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Graph(#[from] CurveGraphError),
}

/// A finitely supported probability measure on words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepDistribution {
    support: Vec<MappingClassWord>,
    masses: Vec<BigRational>,
    /// Cumulative thresholds over the common denominator.
    cumulative: Vec<u64>,
    denominator: u64,
}

impl StepDistribution {
    /// Normalises positive weights so the masses sum to exactly one.
    pub fn new(support: Vec<MappingClassWord>, weights: Vec<BigRational>) -> Result<Self, WalkError> {
        if support.is_empty() {
            return Err(WalkError::EmptySupport);
        }
        if weights.len() != support.len() {
            return Err(WalkError::WeightCount { expected: support.len(), got: weights.len() });
        }
        if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
            return Err(WalkError::NonpositiveWeight(w.to_string()));
        }
        let total: BigRational = weights.iter().sum();
        let masses: Vec<BigRational> = weights.iter().map(|w| w / &total).collect();
        let den = masses.iter().fold(BigInt::one(), |acc, m| acc.lcm(m.denom()));
        let denominator = den.to_u64().filter(|d| *d <= 1 << 63).ok_or(WalkError::DenominatorTooLarge)?;
        let mut acc = 0u64;
        let cumulative = masses
            .iter()
            .map(|m| {
                acc += (m * BigRational::from_integer(den.clone())).to_integer().to_u64().unwrap();
                acc
            })
            .collect();
        Ok(StepDistribution { support, masses, cumulative, denominator })
    }

    pub fn support(&self) -> &[MappingClassWord] {
        &self.support
    }

    pub fn masses(&self) -> &[BigRational] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Index of the support element selected by `r` in `[0, denominator)`.
    fn pick(&self, r: u64) -> usize {
        self.cumulative.partition_point(|&c| c <= r)
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        self.pick(rng.gen_range(0..self.denominator))
    }
}

/// Nearest-neighbour steps `s_1, s_1^-1, s_2, s_2^-1, ...`, uniform by
/// default or proportional to `weights` listed in that order.
pub fn make_step_distribution(gs: &GeneratorSet, weights: Option<&[BigRational]>) -> Result<StepDistribution, WalkError> {
    let support: Vec<MappingClassWord> =
        (0..gs.len()).flat_map(|i| [MappingClassWord::new([Letter::pos(i)]), MappingClassWord::new([Letter::neg(i)])]).collect();
    let weights = match weights {
        Some(w) => w.to_vec(),
        None => vec![BigRational::one(); support.len()],
    };
    StepDistribution::new(support, weights)
}

/// One sample path, a deterministic function of the distribution, the
/// master seed and the sample index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkSample {
    pub seed: u64,
    pub index: u64,
    /// Indices into the distribution's support.
    pub steps: Vec<usize>,
    word: MappingClassWord,
}

impl WalkSample {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `w_n = s_1 ... s_n`, freely reduced.
    pub fn word(&self) -> &MappingClassWord {
        &self.word
    }

    /// `w_k` for `k <= n`.
    pub fn location(&self, mu: &StepDistribution, k: usize) -> MappingClassWord {
        self.steps[..k].iter().fold(MappingClassWord::identity(), |w, &s| w.concat(&mu.support[s]))
    }

    /// Element keys of `w_1, ..., w_n`.
    pub fn location_keys(&self, gs: &GeneratorSet, mu: &StepDistribution) -> Vec<ElementKey> {
        (1..=self.len()).map(|k| gs.element_key(&self.location(mu, k))).collect()
    }

    /// Hex digests of the location keys.
    pub fn fingerprints(&self, gs: &GeneratorSet, mu: &StepDistribution) -> Vec<String> {
        self.location_keys(gs, mu).iter().map(|k| k.digest()).collect()
    }

    pub fn json(&self, gs: &GeneratorSet) -> serde_json::Value {
        json!({
            "seed": self.seed,
            "index": self.index,
            "n": self.steps.len(),
            "steps": self.steps,
            "word": gs.format_word(&self.word),
        })
    }
}

/// The generator for sample `index`: the master seed picks the key and the
/// index picks an independent ChaCha stream.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn sample_path(mu: &StepDistribution, n: usize, seed: u64, index: u64) -> WalkSample {
    let mut rng = sample_rng(seed, index);
    let steps: Vec<usize> = (0..n).map(|_| mu.draw(&mut rng)).collect();
    let word = steps.iter().fold(MappingClassWord::identity(), |w, &s| w.concat(&mu.support[s]));
    WalkSample { seed, index, steps, word }
}

/// Samples `0..count` in parallel; the output is ordered by index and does
/// not depend on the number of threads.
pub fn sample_batch(mu: &StepDistribution, n: usize, seed: u64, count: u64) -> Vec<WalkSample> {
    (0..count).into_par_iter().map(|i| sample_path(mu, n, seed, i)).collect()
}

/// Exact rational masses on canonical element keys, each with a shortest
/// known representative word.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmpiricalMeasure {
    atoms: BTreeMap<ElementKey, (BigRational, MappingClassWord)>,
}

impl EmpiricalMeasure {
    pub fn dirac(key: ElementKey, word: MappingClassWord) -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(key, (BigRational::one(), word));
        EmpiricalMeasure { atoms }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self, key: &ElementKey) -> BigRational {
        self.atoms.get(key).map_or_else(BigRational::zero, |(m, _)| m.clone())
    }

    pub fn total_mass(&self) -> BigRational {
        self.atoms.values().map(|(m, _)| m).sum()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&ElementKey, &BigRational, &MappingClassWord)> {
        self.atoms.iter().map(|(k, (m, w))| (k, m, w))
    }

    fn add(&mut self, key: ElementKey, mass: BigRational, word: MappingClassWord) {
        match self.atoms.get_mut(&key) {
            Some((m, w)) => {
                *m += mass;
                if (word.len(), &word) < (w.len(), &*w) {
                    *w = word;
                }
            }
            None => {
                self.atoms.insert(key, (mass, word));
            }
        }
    }

    /// `digest,numerator,denominator,word` rows sorted by digest.
    pub fn to_csv(&self, gs: &GeneratorSet) -> String {
        let mut rows: Vec<(String, String)> = self
            .atoms
            .iter()
            .map(|(k, (m, w))| {
                let d = k.digest();
                (d.clone(), format!("{d},{},{},{}", m.numer(), m.denom(), gs.format_word(w)))
            })
            .collect();
        rows.sort();
        let mut out = String::from("key,numerator,denominator,word\n");
        for (_, r) in rows {
            out.push_str(&r);
            out.push('\n');
        }
        out
    }
}

/// Number of step sequences of length `n`.
pub fn convolution_size(mu: &StepDistribution, n: usize) -> u128 {
    (0..n).fold(1u128, |acc, _| acc.saturating_mul(mu.len() as u128))
}

/// Default cap on `|support|^n`.
pub const DEFAULT_CONVOLUTION_BUDGET: u128 = 1 << 24;

/// `μ^(n)` by `μ^(k)(g) = Σ_s μ(s) μ^(k-1)(s^-1 g)`, extending on the left.
pub fn exact_convolution(gs: &GeneratorSet, mu: &StepDistribution, n: usize, budget: u128) -> Result<EmpiricalMeasure, WalkError> {
    Ok(convolution_powers(gs, mu, n, budget)?.pop().unwrap())
}

/// `μ^(0), ..., μ^(n)`.
pub fn convolution_powers(gs: &GeneratorSet, mu: &StepDistribution, n: usize, budget: u128) -> Result<Vec<EmpiricalMeasure>, WalkError> {
    let required = convolution_size(mu, n);
    if required > budget {
        return Err(WalkError::BudgetExceeded { required, budget });
    }
    let mut out = vec![EmpiricalMeasure::dirac(gs.identity_key(), MappingClassWord::identity())];
    for _ in 0..n {
        let prev = out.last().unwrap();
        let atoms: Vec<(&ElementKey, &(BigRational, MappingClassWord))> = prev.atoms.iter().collect();
        let parts: Vec<Vec<(ElementKey, BigRational, MappingClassWord)>> = atoms
            .par_iter()
            .map(|(key, (m, w))| {
                mu.support
                    .iter()
                    .zip(&mu.masses)
                    .map(|(s, ms)| {
                        let k = s.letters().iter().rev().fold((*key).clone(), |k, &l| gs.left_multiply_key(l, &k));
                        (k, ms * m, s.concat(w))
                    })
                    .collect()
            })
            .collect();
        let mut next = EmpiricalMeasure::default();
        for part in parts {
            for (k, m, w) in part {
                next.add(k, m, w);
            }
        }
        out.push(next);
    }
    Ok(out)
}

/// The heaviest atom, smallest key first among ties.
pub fn sup_mass(m: &EmpiricalMeasure) -> Option<(ElementKey, BigRational, MappingClassWord)> {
    let mut best: Option<(&ElementKey, &BigRational, &MappingClassWord)> = None;
    for (k, mass, w) in m.atoms() {
        if best.map_or(true, |(_, b, _)| mass > b) {
            best = Some((k, mass, w));
        }
    }
    best.map(|(k, m, w)| (k.clone(), m.clone(), w.clone()))
}

/// Both sides of `μ^(n)(X) <= max_{B_r} μ^(m) + μ^(m)(G \ B_r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub radius: usize,
    pub set_size: usize,
    pub lhs: BigRational,
    pub max_in_ball: BigRational,
    pub mass_outside: BigRational,
    pub rhs: BigRational,
    pub pass: bool,
}

impl LemmaReport {
    pub fn json(&self) -> serde_json::Value {
        json!({
            "k": self.k,
            "m": self.m,
            "n": self.n,
            "radius": self.radius,
            "set_size": self.set_size,
            "lhs": self.lhs.to_string(),
            "max_in_ball": self.max_in_ball.to_string(),
            "mass_outside": self.mass_outside.to_string(),
            "rhs": self.rhs.to_string(),
            "pass": self.pass,
        })
    }
}

/// Radius of the ball in the inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BallRadius {
    /// `⌊k/2⌋`. For even `k` two points of a `k`-separated set can share
    /// this ball, and the inequality can fail.
    Floor,
    /// `⌈k/2⌉ - 1`, the largest radius with `2r < k`.
    Open,
}

impl BallRadius {
    pub fn radius(self, k: usize) -> usize {
        match self {
            BallRadius::Floor => k / 2,
            BallRadius::Open => k.div_ceil(2).saturating_sub(1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BallRadius::Floor => "floor",
            BallRadius::Open => "open",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "floor" => Some(BallRadius::Floor),
            "open" => Some(BallRadius::Open),
            _ => None,
        }
    }
}

/// Checks the inequality with radius `⌊k/2⌋` and the word metric of `gs`.
/// Verifies `m < n` and that `X` is `k`-separated first.
pub fn separated_inequality_check(
    gs: &GeneratorSet,
    mu: &StepDistribution,
    x: &FiniteElementSet,
    k: usize,
    m: usize,
    n: usize,
    budget: u128,
) -> Result<LemmaReport, WalkError> {
    separated_inequality_check_with(gs, mu, x, k, m, n, budget, BallRadius::Floor)
}

#[allow(clippy::too_many_arguments)]
pub fn separated_inequality_check_with(
    gs: &GeneratorSet,
    mu: &StepDistribution,
    x: &FiniteElementSet,
    k: usize,
    m: usize,
    n: usize,
    budget: u128,
    convention: BallRadius,
) -> Result<LemmaReport, WalkError> {
    if m >= n {
        return Err(WalkError::Precondition(format!("m = {m} must be below n = {n}")));
    }
    let ball_budget = usize::try_from(budget).unwrap_or(usize::MAX);
    if !is_k_separated(gs, x, k, ball_budget)? {
        return Err(WalkError::Precondition(format!("set is not {k}-separated")));
    }
    let powers = convolution_powers(gs, mu, n, budget)?;
    let ball = WordBall::new(gs, convention.radius(k), ball_budget)?;
    Ok(lemma_report(x, k, m, n, &powers[m], &powers[n], &ball))
}

/// The inequality from precomputed measures, with the ball's radius.
pub fn lemma_report(
    x: &FiniteElementSet,
    k: usize,
    m: usize,
    n: usize,
    mu_m: &EmpiricalMeasure,
    mu_n: &EmpiricalMeasure,
    ball: &WordBall,
) -> LemmaReport {
    let lhs: BigRational = x.keys().iter().map(|key| mu_n.mass(key)).sum();
    let mut max_in_ball = BigRational::zero();
    let mut mass_outside = BigRational::zero();
    for (key, mass, _) in mu_m.atoms() {
        if ball.distance(key).is_some() {
            if mass > &max_in_ball {
                max_in_ball = mass.clone();
            }
        } else {
            mass_outside += mass;
        }
    }
    let rhs = &max_in_ball + &mass_outside;
    LemmaReport { k, m, n, radius: ball.radius(), set_size: x.len(), pass: lhs <= rhs, lhs, max_in_ball, mass_outside, rhs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{humphries_generators, make_surface};

    #[test]
    fn picks_follow_cumulative_masses() {
        let gs = humphries_generators(&make_surface(2, 0).unwrap()).unwrap();
        let w: Vec<BigRational> = [1, 2, 1, 0].iter().map(|&x| BigRational::from_integer(x.into())).collect();
        assert!(matches!(make_step_distribution(&gs, Some(&w)), Err(WalkError::WeightCount { .. })));
        let small = gs.restrict(&[0, 1]);
        let mu = make_step_distribution(&small, Some(&w)).unwrap_err();
        assert!(matches!(mu, WalkError::NonpositiveWeight(_)));
        let w: Vec<BigRational> = [1, 2, 1, 4].iter().map(|&x| BigRational::from_integer(x.into())).collect();
        let mu = make_step_distribution(&small, Some(&w)).unwrap();
        assert_eq!(mu.denominator, 8);
        let picks: Vec<usize> = (0..8).map(|r| mu.pick(r)).collect();
        assert_eq!(picks, vec![0, 1, 1, 2, 3, 3, 3, 3]);
    }
}
