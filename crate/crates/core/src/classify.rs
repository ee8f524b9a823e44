//! Trichotomy classification with one-sided certificates.
//!
//! A verdict is only issued with a witness that has been checked exactly:
//! the order of a periodic class, an invariant multicurve, or a
//! pseudo-Anosov certificate from homology, from Penner's construction or
//! from intersection growth. `Unknown` is an honest outcome.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use crate::curves::model::ShortPosition;
use crate::curves::{CurveCoordinates, CurveError, MappingClassWord};
use crate::homology::{casson_bleiler, FailedSubtest};
use crate::surface::{CurveFamily, GeneratorSet};

/// Knobs of the classifier. All of them are reported with every verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budgets {
    pub max_order: u32,
    pub search_bound: usize,
    pub iterations: usize,
    /// λ̂ must exceed `1 + threshold`.
    pub threshold: BigRational,
    /// The last three ratios must agree within this relative tolerance.
    pub tolerance: BigRational,
}

impl Budgets {
    pub fn for_genus(g: usize) -> Self {
        Budgets {
            max_order: 4 * g as u32 + 2,
            search_bound: 1,
            iterations: 24,
            threshold: BigRational::new(1.into(), 20.into()),
            tolerance: BigRational::new(1.into(), 100.into()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PaSource {
    Homology,
    Growth,
    PennerForm,
}

impl PaSource {
    pub fn name(self) -> &'static str {
        match self {
            PaSource::Homology => "homology",
            PaSource::Growth => "growth",
            PaSource::PennerForm => "penner_form",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Periodic(u32),
    Reducible(Vec<CurveCoordinates>),
    PseudoAnosov { source: PaSource, dilatation: Option<BigRational> },
    Unknown,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Periodic(_) => "periodic",
            Verdict::Reducible(_) => "reducible",
            Verdict::PseudoAnosov { .. } => "pseudo_anosov",
            Verdict::Unknown => "unknown",
        }
    }

    pub fn is_pseudo_anosov(&self) -> bool {
        matches!(self, Verdict::PseudoAnosov { .. })
    }

    pub fn source(&self) -> Option<PaSource> {
        match self {
            Verdict::PseudoAnosov { source, .. } => Some(*source),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Periodic(n) => write!(f, "periodic({n})"),
            Verdict::Reducible(m) => write!(f, "reducible({} curves)", m.len()),
            Verdict::PseudoAnosov { source, .. } => write!(f, "pseudo_anosov({})", source.name()),
            Verdict::Unknown => write!(f, "unknown"),
        }
    }
}

/// Exact intersection sequence `i(w^n(c), c)` for `n = 1..=N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthReport {
    pub curve: CurveCoordinates,
    pub iterations: usize,
    pub sequence: Vec<BigInt>,
    /// `sequence[n+1] / sequence[n]`, absent where the denominator is zero.
    pub ratios: Vec<Option<BigRational>>,
    pub stabilised: bool,
    pub lambda: Option<BigRational>,
    /// An invariant multicurve was found, which vetoes the certificate.
    pub reducible_veto: bool,
    pub positive: bool,
}

/// Least `n <= max_order` with `w^n` the identity.
pub fn periodic_order(gs: &GeneratorSet, w: &MappingClassWord, max_order: u32) -> Option<u32> {
    let battery = gs.system().battery();
    let m = gs.matrix(w);
    let mut power = m.clone();
    let mut probe = gs.act(w, &battery[0]);
    for n in 1..=max_order {
        if power.is_identity() && probe == battery[0] {
            let wn = w.pow(n);
            if battery.iter().all(|c| &gs.act(&wn, c) == c) {
                return Some(n);
            }
        }
        power = power.mul(&m);
        probe = gs.act(w, &probe);
    }
    None
}

struct Candidate {
    curve: CurveCoordinates,
    short: Option<ShortPosition>,
}

/// Curated curves and their images under short words, searched in a fixed
/// order for one whose orbit is a multicurve.
pub struct ReductionSearch {
    candidates: Vec<Candidate>,
    max_orbit: usize,
}

impl ReductionSearch {
    /// Battery and generator curves, closed under words of length up to
    /// `search_bound`.
    pub fn new(gs: &GeneratorSet, search_bound: usize) -> Self {
        let mut base: Vec<CurveCoordinates> = gs.system().battery().to_vec();
        for g in gs.generators() {
            base.extend(g.curves.iter().cloned());
        }
        let mut seen = std::collections::HashSet::new();
        let mut curves = Vec::new();
        for c in base {
            if seen.insert(c.clone()) {
                curves.push(c);
            }
        }
        let mut frontier = curves.clone();
        for _ in 0..search_bound {
            let mut next = Vec::new();
            for c in &frontier {
                for i in 0..gs.len() {
                    for inv in [false, true] {
                        let mut x = c.clone();
                        gs.apply_letter(crate::curves::Letter::new(i, inv), &mut x);
                        if seen.insert(x.clone()) {
                            next.push(x);
                        }
                    }
                }
            }
            curves.extend(next.iter().cloned());
            frontier = next;
        }
        Self::from_curves(gs, curves)
    }

    pub fn from_curves(gs: &GeneratorSet, curves: Vec<CurveCoordinates>) -> Self {
        let sys = gs.system();
        let candidates = curves
            .into_iter()
            .map(|curve| Candidate { short: sys.short_position(&curve).ok(), curve })
            .collect();
        ReductionSearch { candidates, max_orbit: 3 * gs.genus() - 2 }
    }

    /// The same search with every candidate moved by `u`.
    pub fn transported(&self, gs: &GeneratorSet, u: &MappingClassWord) -> Self {
        Self::from_curves(gs, self.candidates.iter().map(|c| gs.act(u, &c.curve)).collect())
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// The orbit of the first candidate whose `w`-orbit closes up within
    /// `3g - 2` steps into pairwise disjoint curves.
    pub fn find(&self, gs: &GeneratorSet, w: &MappingClassWord) -> Option<Vec<CurveCoordinates>> {
        let sys = gs.system();
        'candidates: for cand in &self.candidates {
            let c = &cand.curve;
            let mut orbit = vec![c.clone()];
            let mut x = gs.act(w, c);
            while &x != c {
                if orbit.len() >= self.max_orbit {
                    continue 'candidates;
                }
                // i(w^a c, w^b c) = i(c, w^(b-a) c), so testing against c suffices.
                let meets = match &cand.short {
                    Some(sp) => !sp.intersection(x.weights()).is_zero(),
                    None => sys.intersection(c, &x).map_or(true, |v| !v.is_zero()),
                };
                if meets || orbit.contains(&x) {
                    continue 'candidates;
                }
                orbit.push(x.clone());
                x = gs.act(w, &x);
            }
            return Some(orbit);
        }
        None
    }
}

/// An invariant multicurve among curated curves and their images under words
/// of length at most `search_bound`. `None` does not prove irreducibility.
pub fn find_invariant_multicurve(gs: &GeneratorSet, w: &MappingClassWord, search_bound: usize) -> Option<Vec<CurveCoordinates>> {
    ReductionSearch::new(gs, search_bound).find(gs, w)
}

fn intersection_sequence(gs: &GeneratorSet, w: &MappingClassWord, c: &CurveCoordinates, iterations: usize) -> Result<Vec<BigInt>, CurveError> {
    let sp = gs.system().short_position(c)?;
    let mut x = c.clone();
    let mut out = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        x = gs.act(w, &x);
        out.push(sp.intersection(x.weights()));
    }
    Ok(out)
}

fn growth_from_sequence(curve: CurveCoordinates, sequence: Vec<BigInt>, budgets: &Budgets, reducible_veto: bool) -> GrowthReport {
    let ratios: Vec<Option<BigRational>> = sequence
        .windows(2)
        .map(|p| if p[0].is_zero() { None } else { Some(BigRational::new(p[1].clone(), p[0].clone())) })
        .collect();
    let tail: Option<Vec<BigRational>> = if ratios.len() >= 3 { ratios[ratios.len() - 3..].iter().cloned().collect() } else { None };
    let stabilised = tail.as_ref().is_some_and(|t| {
        let lo = t.iter().min().unwrap();
        let hi = t.iter().max().unwrap();
        hi - lo <= lo * &budgets.tolerance
    });
    let lambda = if stabilised { tail.and_then(|t| t.last().cloned()) } else { None };
    let exceeds = lambda.as_ref().is_some_and(|l| l > &(BigRational::one() + &budgets.threshold));
    GrowthReport {
        curve,
        iterations: sequence.len(),
        sequence,
        ratios,
        stabilised,
        lambda,
        reducible_veto,
        positive: stabilised && exceeds && !reducible_veto,
    }
}

/// Intersection growth of `c` under iterates of `w`, with the default
/// tolerance and reducibility search.
pub fn growth_certificate(
    gs: &GeneratorSet,
    w: &MappingClassWord,
    c: &CurveCoordinates,
    iterations: usize,
    threshold: BigRational,
) -> Result<GrowthReport, CurveError> {
    let budgets = Budgets { iterations, threshold, ..Budgets::for_genus(gs.genus()) };
    let search = ReductionSearch::new(gs, budgets.search_bound);
    growth_with(gs, w, c, &budgets, &search)
}

fn growth_with(gs: &GeneratorSet, w: &MappingClassWord, c: &CurveCoordinates, budgets: &Budgets, search: &ReductionSearch) -> Result<GrowthReport, CurveError> {
    let sequence = intersection_sequence(gs, w, c, budgets.iterations.max(4))?;
    let report = growth_from_sequence(c.clone(), sequence, budgets, false);
    if report.stabilised && report.lambda.is_some() {
        let veto = search.find(gs, w).is_some();
        return Ok(GrowthReport { positive: report.positive && !veto, reducible_veto: veto, ..report });
    }
    Ok(report)
}

/// Positive twists about the odd chain curves `c_1, c_3, ...`, negative
/// twists about the even ones, every chain curve used. The chain fills, so
/// Penner's construction makes such a word pseudo-Anosov.
pub fn penner_form(gs: &GeneratorSet, w: &MappingClassWord) -> bool {
    let n = gs.system().chain().len();
    let mut used = vec![false; n];
    for l in w.letters() {
        let g = &gs.generators()[l.index()];
        if g.id.family != CurveFamily::Chain || g.id.index >= n {
            return false;
        }
        let sign = g.sign * l.sign();
        let want = if g.id.index % 2 == 0 { 1 } else { -1 };
        if sign != want {
            return false;
        }
        used[g.id.index] = true;
    }
    used.iter().all(|&u| u)
}

/// A verdict with a short human-readable description of its witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    pub witness: String,
}

/// Classifier with the reducibility candidates precomputed.
pub struct Classifier<'a> {
    gs: &'a GeneratorSet,
    budgets: Budgets,
    search: ReductionSearch,
}

impl<'a> Classifier<'a> {
    pub fn new(gs: &'a GeneratorSet, budgets: Budgets) -> Self {
        let search = ReductionSearch::new(gs, budgets.search_bound);
        Classifier { gs, budgets, search }
    }

    pub fn with_search(gs: &'a GeneratorSet, budgets: Budgets, search: ReductionSearch) -> Self {
        Classifier { gs, budgets, search }
    }

    pub fn budgets(&self) -> &Budgets {
        &self.budgets
    }

    pub fn search(&self) -> &ReductionSearch {
        &self.search
    }

    /// A pseudo-Anosov class is neither periodic nor reducible, so running
    /// the cheap pseudo-Anosov certificates before the searches gives the
    /// same verdict as the order periodic, reducible, homology, Penner,
    /// growth.
    pub fn classify(&self, w: &MappingClassWord) -> Classification {
        let gs = self.gs;
        let cert = casson_bleiler(&gs.matrix(w));
        if cert.is_certified() {
            return Classification {
                verdict: Verdict::PseudoAnosov { source: PaSource::Homology, dilatation: None },
                witness: format!("char_poly={}", cert.char_poly.to_text()),
            };
        }
        if penner_form(gs, w) {
            return Classification {
                verdict: Verdict::PseudoAnosov { source: PaSource::PennerForm, dilatation: None },
                witness: "penner_form chain_split".to_string(),
            };
        }
        if let Some(n) = periodic_order(gs, w, self.budgets.max_order) {
            return Classification { verdict: Verdict::Periodic(n), witness: format!("order={n}") };
        }
        if let Some(m) = self.search.find(gs, w) {
            let witness = format!("multicurve {}", m.iter().map(|c| format!("[{}]", c.weights())).collect::<Vec<_>>().join(" "));
            return Classification { verdict: Verdict::Reducible(m), witness };
        }
        // The multicurve search already failed, so the growth veto is moot.
        if let Some(report) = self.growth_verdict(w, false).filter(|r| r.positive) {
            let lambda = report.lambda.clone();
            let witness =
                format!("growth curve=[{}] lambda~{:.6}", report.curve.weights(), lambda.as_ref().and_then(|l| l.to_f64()).unwrap_or(f64::NAN));
            return Classification { verdict: Verdict::PseudoAnosov { source: PaSource::Growth, dilatation: lambda }, witness };
        }
        let witness = match cert.failed {
            Some(FailedSubtest::Reducible) => "homology reducible",
            Some(FailedSubtest::Cyclotomic) => "homology cyclotomic",
            Some(FailedSubtest::PowerSubstitution(_)) => "homology power substitution",
            None => "",
        };
        Classification { verdict: Verdict::Unknown, witness: format!("no certificate; {witness}") }
    }

    /// Growth report on the first chain curve whose intersection sequence
    /// does not end at zero. With `veto`, a positive report is withdrawn
    /// when the reduction search finds an invariant multicurve.
    pub fn growth_verdict(&self, w: &MappingClassWord, veto: bool) -> Option<GrowthReport> {
        let gs = self.gs;
        for c in gs.system().chain() {
            let Ok(seq) = intersection_sequence(gs, w, c, self.budgets.iterations.max(4)) else { continue };
            if seq.last().map_or(true, |x| x.is_zero()) {
                continue;
            }
            let mut report = growth_from_sequence(c.clone(), seq, &self.budgets, false);
            if veto && report.positive && self.search.find(gs, w).is_some() {
                report.reducible_veto = true;
                report.positive = false;
            }
            return Some(report);
        }
        None
    }

    pub fn growth(&self, w: &MappingClassWord, c: &CurveCoordinates) -> Result<GrowthReport, CurveError> {
        growth_with(self.gs, w, c, &self.budgets, &self.search)
    }

    /// One JSON record: word, verdict, source, witness, budgets and λ̂.
    pub fn json_line(&self, w: &MappingClassWord, c: &Classification) -> String {
        let b = &self.budgets;
        let lambda = match &c.verdict {
            Verdict::PseudoAnosov { dilatation: Some(l), .. } => json!(l.to_string()),
            _ => serde_json::Value::Null,
        };
        json!({
            "word": self.gs.format_word(w),
            "verdict": c.verdict.name(),
            "source": c.verdict.source().map(|s| s.name()),
            "witness": c.witness,
            "budgets": {
                "max_order": b.max_order,
                "search_bound": b.search_bound,
                "iterations": b.iterations,
                "threshold": b.threshold.to_string(),
                "tolerance": b.tolerance.to_string(),
            },
            "lambda": lambda,
        })
        .to_string()
    }
}

pub fn classify(gs: &GeneratorSet, w: &MappingClassWord, budgets: &Budgets) -> Verdict {
    Classifier::new(gs, budgets.clone()).classify(w).verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{humphries_generators, make_surface};

    fn gs2() -> GeneratorSet {
        humphries_generators(&make_surface(2, 0).unwrap()).unwrap()
    }

    #[test]
    fn growth_report_flags_linear_sequences() {
        let b = Budgets::for_genus(2);
        let seq: Vec<BigInt> = (1..=24).map(BigInt::from).collect();
        let r = growth_from_sequence(gs2().system().chain()[0].clone(), seq, &b, false);
        assert!(r.stabilised);
        assert!(!r.positive);
        let seq: Vec<BigInt> = (1..=10u32).map(|n| BigInt::from(3u64.pow(n))).collect();
        let r = growth_from_sequence(gs2().system().chain()[0].clone(), seq, &b, false);
        assert!(r.positive);
        assert_eq!(r.lambda, Some(BigRational::from_integer(3.into())));
    }

    #[test]
    fn penner_form_checks_signs_and_coverage() {
        let gs = gs2();
        let w = |t: &str| gs.parse_word(t).unwrap();
        assert!(penner_form(&gs, &w("T1 T2^-1 T3 T4^-1 T5")));
        assert!(!penner_form(&gs, &w("T1 T2 T3 T4 T5")));
        assert!(!penner_form(&gs, &w("T1")));
        assert!(!penner_form(&gs, &w("T1 T2^-1 T3 T4^-1")));
    }
}
