//! Curve-graph distance bounds, orbit-point length proxies, word-metric
//! balls and the finite set constructions built on them.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::curves::filling::{fills, FillingReport};
use crate::curves::{CurveCoordinates, CurveError, ElementKey, MappingClassWord};
use crate::surface::GeneratorSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveGraphError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("ball enumeration needs up to {required} elements, budget is {budget}")]
    BudgetExceeded { required: u128, budget: usize },
}

/// Why a bound holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundTag {
    /// The curves coincide.
    Equal,
    /// Distinct and disjoint: adjacent vertices.
    Disjoint,
    /// Positive intersection: not adjacent.
    Intersecting,
    /// Exactly one intersection point: a common disjoint curve exists.
    SingleCrossing,
    /// A curated pair certified to fill.
    CuratedFilling,
    /// The drawing check certified that the pair fills.
    DrawnFilling,
    /// `d <= 2 + 2 log2 i`, a standard bound imported from outside the model.
    LogUpper,
}

impl BoundTag {
    pub fn name(self) -> &'static str {
        match self {
            BoundTag::Equal => "equal",
            BoundTag::Disjoint => "disjoint",
            BoundTag::Intersecting => "intersecting",
            BoundTag::SingleCrossing => "single_crossing",
            BoundTag::CuratedFilling => "curated_filling",
            BoundTag::DrawnFilling => "drawn_filling",
            BoundTag::LogUpper => "log_upper",
        }
    }
}

/// `lower <= d(a, b) <= upper`; `upper = None` means no finite bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceBounds {
    pub lower: u32,
    pub upper: Option<u32>,
    pub tags: Vec<BoundTag>,
}

impl DistanceBounds {
    pub fn exact(d: u32, tag: BoundTag) -> Self {
        DistanceBounds { lower: d, upper: Some(d), tags: vec![tag] }
    }

    /// `lower,upper,tags` with `inf` for a missing upper bound and tags
    /// joined by `|`.
    pub fn csv(&self) -> String {
        let upper = self.upper.map_or("inf".to_string(), |u| u.to_string());
        let tags: Vec<&str> = self.tags.iter().map(|t| t.name()).collect();
        format!("{},{},{}", self.lower, upper, tags.join("|"))
    }
}

impl fmt::Display for DistanceBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(u) => write!(f, "[{}, {}]", self.lower, u),
            None => write!(f, "[{}, inf]", self.lower),
        }
    }
}

/// `ceil(2 log2 i)` for `i >= 1`: the least `k` with `2^k >= i^2`.
fn ceil_two_log2(i: &BigInt) -> u32 {
    let sq: BigInt = i * i;
    let m = sq - BigInt::one();
    if m.is_zero() {
        0
    } else {
        m.bits() as u32
    }
}

/// Largest total normal-coordinate weight for which a pair is drawn.
pub const DRAW_LIMIT: u64 = 3000;

/// Distance bounds from the intersection number, the curated tables and,
/// for small pairs, the drawing-based filling check.
pub fn distance_bounds(gs: &GeneratorSet, a: &CurveCoordinates, b: &CurveCoordinates) -> Result<DistanceBounds, CurveError> {
    if a == b {
        return Ok(DistanceBounds::exact(0, BoundTag::Equal));
    }
    let sys = gs.system();
    let i = sys.intersection(a, b)?;
    let mut d = bounds_from_intersection(&i, sys.is_curated_filling_pair(a, b));
    // A single crossing leaves a torus with one hole uncovered.
    if d.lower == 2 && i > BigInt::one() && drawn_filling(gs, a, b) {
        d.lower = 3;
        d.tags.push(BoundTag::DrawnFilling);
        d.tags.sort();
    }
    Ok(d)
}

fn drawn_filling(gs: &GeneratorSet, a: &CurveCoordinates, b: &CurveCoordinates) -> bool {
    let small = |c: &CurveCoordinates| u64::try_from(c.weights().total()).is_ok_and(|t| t <= DRAW_LIMIT);
    if !small(a) || !small(b) {
        return false;
    }
    let model = gs.system().model();
    match (model.word_of(a), model.word_of(b)) {
        (Some(x), Some(y)) => fills(model.polygon(), &[x, y]) == FillingReport::Fills,
        _ => false,
    }
}

fn bounds_from_intersection(i: &BigInt, curated: bool) -> DistanceBounds {
    if i.is_zero() {
        return DistanceBounds::exact(1, BoundTag::Disjoint);
    }
    let upper = 2 + ceil_two_log2(i);
    let mut tags = vec![BoundTag::Intersecting];
    if i.is_one() {
        tags.push(BoundTag::SingleCrossing);
    }
    let lower = if curated {
        tags.push(BoundTag::CuratedFilling);
        3
    } else {
        2
    };
    if !i.is_one() {
        tags.push(BoundTag::LogUpper);
    }
    DistanceBounds { lower, upper: Some(upper), tags }
}

/// The basepoint `x_0 = c_1`.
pub fn basepoint(gs: &GeneratorSet) -> &CurveCoordinates {
    &gs.system().chain()[0]
}

/// Bounds on `d(x_0, w x_0)`, standing in for the relative length of `w`.
pub fn rel_length_proxy(gs: &GeneratorSet, w: &MappingClassWord) -> DistanceBounds {
    let x0 = basepoint(gs);
    let y = gs.act(w, x0);
    // x_0 is a chain curve, so its intersections are always available.
    distance_bounds(gs, x0, &y).expect("basepoint intersections are tabulated")
}

/// Upper bound on the number of freely reduced words of length `<= k` over
/// `n` generators and their inverses.
pub fn reduced_ball_bound(n: usize, k: usize) -> u128 {
    let letters = 2 * n as u128;
    let mut total: u128 = 1;
    let mut layer: u128 = 1;
    for j in 1..=k {
        layer = if j == 1 { letters } else { layer.saturating_mul(letters.saturating_sub(1)) };
        total = total.saturating_add(layer);
    }
    total
}

/// Default cap on the number of reduced words a ball may require.
pub const DEFAULT_BALL_BUDGET: usize = 250_000;

/// The word-metric ball `B_k` of the generator set, by element key.
#[derive(Clone, Debug)]
pub struct WordBall {
    radius: usize,
    distance: HashMap<ElementKey, usize>,
    representative: Vec<(ElementKey, MappingClassWord)>,
}

impl WordBall {
    /// Breadth-first enumeration. Fails before doing any work when the
    /// reduced-word count for the radius exceeds `budget`.
    pub fn new(gs: &GeneratorSet, radius: usize, budget: usize) -> Result<Self, CurveGraphError> {
        let required = reduced_ball_bound(gs.len(), radius);
        if required > budget as u128 {
            return Err(CurveGraphError::BudgetExceeded { required, budget });
        }
        let id = gs.identity_key();
        let mut distance = HashMap::new();
        distance.insert(id.clone(), 0);
        let mut representative = vec![(id.clone(), MappingClassWord::identity())];
        let mut frontier = vec![(id, MappingClassWord::identity())];
        for r in 1..=radius {
            let mut next = Vec::new();
            for (key, w) in &frontier {
                for i in 0..gs.len() {
                    for inv in [false, true] {
                        let l = crate::curves::Letter::new(i, inv);
                        if w.letters().first() == Some(&l.inv()) {
                            continue;
                        }
                        let k2 = gs.left_multiply_key(l, key);
                        if distance.contains_key(&k2) {
                            continue;
                        }
                        let w2 = MappingClassWord::new([l]).concat(w);
                        distance.insert(k2.clone(), r);
                        representative.push((k2.clone(), w2.clone()));
                        next.push((k2, w2));
                    }
                }
            }
            frontier = next;
        }
        Ok(WordBall { radius, distance, representative })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.distance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distance.is_empty()
    }

    /// Word length of the element, if it is at most the radius.
    pub fn distance(&self, key: &ElementKey) -> Option<usize> {
        self.distance.get(key).copied()
    }

    pub fn contains_within(&self, key: &ElementKey, k: usize) -> bool {
        self.distance(key).is_some_and(|d| d <= k)
    }

    /// Elements with a shortest representative, in enumeration order.
    pub fn elements(&self) -> &[(ElementKey, MappingClassWord)] {
        &self.representative
    }
}

/// True when `w` has word length at most `k`.
pub fn ball_membership(gs: &GeneratorSet, w: &MappingClassWord, k: usize, budget: usize) -> Result<bool, CurveGraphError> {
    if w.len() <= k {
        return Ok(true);
    }
    let ball = WordBall::new(gs, k, budget)?;
    Ok(ball.distance(&gs.element_key(w)).is_some())
}

/// Finitely many mapping classes, without repeats.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteElementSet {
    words: Vec<MappingClassWord>,
    keys: Vec<ElementKey>,
}

impl FiniteElementSet {
    /// Keeps the first word of each class.
    pub fn new(gs: &GeneratorSet, words: impl IntoIterator<Item = MappingClassWord>) -> Self {
        let mut s = FiniteElementSet::default();
        for w in words {
            s.insert(gs, w);
        }
        s
    }

    /// Adds `w` unless its class is present; returns whether it was added.
    pub fn insert(&mut self, gs: &GeneratorSet, w: MappingClassWord) -> bool {
        let key = gs.element_key(&w);
        if self.keys.contains(&key) {
            return false;
        }
        self.words.push(w);
        self.keys.push(key);
        true
    }

    pub fn words(&self) -> &[MappingClassWord] {
        &self.words
    }

    pub fn keys(&self) -> &[ElementKey] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains_key(&self, key: &ElementKey) -> bool {
        self.keys.contains(key)
    }

    fn subset(&self, keep: &[bool]) -> Self {
        let mut s = FiniteElementSet::default();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                s.words.push(self.words[i].clone());
                s.keys.push(self.keys[i].clone());
            }
        }
        s
    }
}

/// Marks elements of `R` within distance `k` of another element, either by
/// testing all quotients `r^-1 r'` or by translating the ball, whichever
/// needs fewer element keys.
fn close_pairs(gs: &GeneratorSet, r: &FiniteElementSet, ball: &WordBall, k: usize) -> Vec<bool> {
    let n = r.len();
    let shell: Vec<&MappingClassWord> = ball.elements().iter().filter(|(key, _)| ball.distance(key).is_some_and(|d| (1..=k).contains(&d))).map(|(_, w)| w).collect();
    if shell.len() < n / 2 {
        let index: HashMap<&ElementKey, usize> = r.keys.iter().enumerate().map(|(i, key)| (key, i)).collect();
        let mut keep = vec![false; n];
        for i in 0..n {
            for b in &shell {
                if let Some(&j) = index.get(&gs.element_key(&r.words[i].concat(b))) {
                    keep[i] = true;
                    keep[j] = true;
                }
            }
        }
        return keep;
    }
    let mut keep = vec![false; n];
    for i in 0..n {
        let inv = r.words[i].inverse();
        for j in i + 1..n {
            if keep[i] && keep[j] {
                continue;
            }
            if ball.contains_within(&gs.element_key(&inv.concat(&r.words[j])), k) {
                keep[i] = true;
                keep[j] = true;
            }
        }
    }
    keep
}

/// `R_k`: the elements of `R` within word distance `k` of another element.
pub fn k_dense_subset(gs: &GeneratorSet, r: &FiniteElementSet, k: usize, budget: usize) -> Result<FiniteElementSet, CurveGraphError> {
    if r.len() < 2 {
        return Ok(FiniteElementSet::default());
    }
    let ball = WordBall::new(gs, k, budget)?;
    Ok(k_dense_subset_in(gs, r, k, &ball))
}

/// `R_k` using a precomputed ball of radius at least `k`.
pub fn k_dense_subset_in(gs: &GeneratorSet, r: &FiniteElementSet, k: usize, ball: &WordBall) -> FiniteElementSet {
    assert!(ball.radius() >= k, "ball radius {} below {k}", ball.radius());
    r.subset(&close_pairs(gs, r, ball, k))
}

/// Distinct elements are at word distance at least `k`.
pub fn is_k_separated(gs: &GeneratorSet, x: &FiniteElementSet, k: usize, budget: usize) -> Result<bool, CurveGraphError> {
    if k == 0 {
        return Ok(true);
    }
    Ok(k_dense_subset(gs, x, k - 1, budget)?.is_empty())
}

/// `y` lies in the `L`-horoball neighbourhood of `X`: some `x` has
/// `proxy(x^-1 y) <= proxy(x) + L`, both proxies being the upper bound of
/// [`rel_length_proxy`].
pub fn horoball_member(gs: &GeneratorSet, x: &FiniteElementSet, l: u32, y: &MappingClassWord) -> bool {
    x.words().iter().any(|xw| {
        let d = rel_length_proxy(gs, &xw.inverse().concat(y)).upper;
        let len = rel_length_proxy(gs, xw).upper;
        match (d, len) {
            (Some(d), Some(len)) => d <= len + l,
            (_, None) => true,
            (None, Some(_)) => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_bound_matches_definition() {
        for (i, want) in [(1u32, 0u32), (2, 2), (3, 4), (4, 4), (5, 5), (16, 8), (17, 9)] {
            assert_eq!(ceil_two_log2(&BigInt::from(i)), want, "i={i}");
            let f = (2.0 * (i as f64).log2()).ceil() as u32;
            assert_eq!(want, f);
        }
    }

    #[test]
    fn reduced_counts() {
        assert_eq!(reduced_ball_bound(2, 0), 1);
        assert_eq!(reduced_ball_bound(2, 1), 5);
        assert_eq!(reduced_ball_bound(2, 2), 17);
        assert_eq!(reduced_ball_bound(5, 3), 1 + 10 + 90 + 810);
    }

    #[test]
    fn bounds_csv() {
        let b = bounds_from_intersection(&BigInt::from(3), false);
        assert_eq!(b.csv(), "2,6,intersecting|log_upper");
        assert_eq!(DistanceBounds::exact(0, BoundTag::Equal).csv(), "0,0,equal");
    }
}
