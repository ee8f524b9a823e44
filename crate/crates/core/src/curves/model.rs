//! The concrete genus-g model: the fan triangulation of the 4g-gon, the chain
//! curves, and Dehn twists compiled to flip sequences.
//!
//! A twist about a nonseparating curve `c` is compiled once. A greedy flip
//! search moves the triangulation until `c` crosses exactly two edges, once
//! each. Those two edges are the rungs of an annulus made of two triangles
//! with core `c`. In that position the twist is a single flip of one rung
//! followed by a relabelling, and the compiled encoding conjugates that move
//! back to the base triangulation.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Signed;

use super::polygon::{self, CyclicWord, Polygon, Side};
use super::triangulation::{polygon_word_weights, Encoding, OEdge, Step, Triangulation};
use super::weights::Weights;
use super::{CurveCoordinates, CurveError};

/// Sign relating the compiled flip move to the positive twist, which acts on
/// homology by `x -> x + <x, c> c`. Checked against traced homology in tests.
const FLIP_MOVE_IS_POSITIVE: bool = true;

/// Longest cyclic word the tracer will produce.
pub const TRACE_LIMIT: usize = 20_000;

/// A curve in short position: the flips reaching it and its two rungs.
#[derive(Clone, Debug)]
pub struct ShortPosition {
    /// Flips from the base triangulation to one where the curve is short.
    pub to_short: Encoding,
    pub rungs: (usize, usize),
    /// The two triangles containing both rungs, in the short triangulation.
    pub annulus: [[OEdge; 3]; 2],
    /// The positive twist about the curve, as an encoding on base coordinates.
    pub twist: Encoding,
}

/// Which end of an edge a corner sits at.
#[derive(Clone, Copy, PartialEq, Eq)]
enum End {
    Tail,
    Head,
}

/// The rung corner of a triangle: the ends of `e` and `f` it touches, and
/// the third edge.
fn rung_corner(tri: &[OEdge; 3], e: usize, f: usize) -> (End, End, usize) {
    for k in 0..3 {
        let (a, b) = (tri[k], tri[(k + 1) % 3]);
        let labels = (a.label(), b.label());
        if labels == (e, f) || labels == (f, e) {
            // The corner is at the head of `a` and the tail of `b`.
            let head_a = if a.0 % 2 == 0 { End::Head } else { End::Tail };
            let tail_b = if b.0 % 2 == 0 { End::Tail } else { End::Head };
            let third = tri[(k + 2) % 3].label();
            return if labels.0 == e { (head_a, tail_b, third) } else { (tail_b, head_a, third) };
        }
    }
    unreachable!("triangle does not contain both rungs")
}

impl ShortPosition {
    /// `i(c, x)` for the short curve `c`.
    ///
    /// Inside each annulus triangle, `c` is an arc cutting off the corner
    /// between the rungs. If it meets `e` after `u` points of `x` counted from
    /// that corner and `f` after `v`, it crosses `|min(u,n) - min(v,n)|`
    /// corner arcs and `(u-n)+ + (v-n)+` arcs leaving through the third side,
    /// where `n` is the number of corner arcs of `x`. Minimising over the
    /// placement `(u, v)` gives the geometric intersection number. The
    /// objective is piecewise linear with breaklines of slopes `0`, `∞` and
    /// `±1`, so integer points around pairwise breakline crossings suffice.
    pub fn intersection(&self, x: &Weights) -> BigInt {
        let mut y = x.clone();
        self.to_short.apply(&mut y);
        let (e, f) = self.rungs;
        let (xe, xf) = (y.get(e), y.get(f));
        let zero = BigInt::from(0);
        let pos = |v: BigInt| if v > zero { v } else { zero.clone() };
        let sides: Vec<(End, End, BigInt)> = self
            .annulus
            .iter()
            .map(|t| {
                let (ee, ef, p) = rung_corner(t, e, f);
                let n = (&xe + &xf - y.get(p)) / 2;
                (ee, ef, n)
            })
            .collect();
        let local = |end: End, total: &BigInt, u: &BigInt| if end == End::Tail { u.clone() } else { total - u };
        let cost = |u: &BigInt, v: &BigInt| -> BigInt {
            let mut c = BigInt::from(0);
            for (ee, ef, n) in &sides {
                let (ut, vt) = (local(*ee, &xe, u), local(*ef, &xf, v));
                let (mu, mv) = (ut.clone().min(n.clone()), vt.clone().min(n.clone()));
                c += (mu - mv).abs() + pos(&ut - n) + pos(&vt - n);
            }
            c
        };
        // Breaklines a*u + b*v = k.
        let mut lines: Vec<(i32, i32, BigInt)> = vec![(1, 0, zero.clone()), (1, 0, xe.clone()), (0, 1, zero.clone()), (0, 1, xf.clone())];
        for (ee, ef, n) in &sides {
            lines.push((1, 0, if *ee == End::Tail { n.clone() } else { &xe - n }));
            lines.push((0, 1, if *ef == End::Tail { n.clone() } else { &xf - n }));
            // local(u) = local(v), with local(u) = u or xe - u.
            match (ee, ef) {
                (End::Tail, End::Tail) => lines.push((1, -1, zero.clone())),
                (End::Head, End::Head) => lines.push((1, -1, &xe - &xf)),
                (End::Tail, End::Head) => lines.push((1, 1, xf.clone())),
                (End::Head, End::Tail) => lines.push((1, 1, xe.clone())),
            }
        }
        let clamp = |v: BigInt, hi: &BigInt| v.max(zero.clone()).min(hi.clone());
        let mut best: Option<BigInt> = None;
        let mut consider = |u: BigInt, v: BigInt| {
            let c = cost(&clamp(u, &xe), &clamp(v, &xf));
            if best.as_ref().map_or(true, |b| &c < b) {
                best = Some(c);
            }
        };
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (a1, b1, k1) = &lines[i];
                let (a2, b2, k2) = &lines[j];
                let det = a1 * b2 - a2 * b1;
                if det == 0 {
                    continue;
                }
                // Cramer's rule; det is ±1 or ±2.
                let un = k1 * BigInt::from(*b2) - k2 * BigInt::from(*b1);
                let vn = k2 * BigInt::from(*a1) - k1 * BigInt::from(*a2);
                let d = BigInt::from(det);
                for du in [-1i32, 0, 1] {
                    for dv in [-1i32, 0, 1] {
                        consider(floor_div(&un, &d) + du, floor_div(&vn, &d) + dv);
                    }
                }
            }
        }
        best.unwrap_or(zero)
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.div_floor(b)
}

#[derive(Clone, Debug)]
pub struct SurfaceModel {
    genus: usize,
    polygon: Polygon,
    base: Triangulation,
    side_of: HashMap<OEdge, Side>,
}

impl SurfaceModel {
    pub fn new(genus: usize) -> Self {
        assert!(genus >= 2, "surface model needs genus >= 2");
        let polygon = Polygon::new(genus);
        let base = Triangulation::polygon_fan(&polygon);
        let mut side_of = HashMap::new();
        for s in 0..polygon.sides() {
            let (e, fwd) = polygon.edge_of(s);
            side_of.insert(if fwd { OEdge::fwd(e) } else { OEdge::rev(e) }, s);
        }
        SurfaceModel { genus, polygon, base, side_of }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn base(&self) -> &Triangulation {
        &self.base
    }

    pub fn edge_count(&self) -> usize {
        self.base.edge_count()
    }

    /// Exit-side words of the chain `c_1, ..., c_{2g+1}`: `c_1` and
    /// `c_{2g+1}` cross `b_1` and `b_g`, `c_{2i}` crosses `a_i`, and
    /// `c_{2i+1}` runs `b_i, a_{i+1}, b_{i+1}^-1, a_{i+1}^-1` (homologous to
    /// `α_i - α_{i+1}`).
    pub fn chain_words(&self) -> Vec<Vec<Side>> {
        let g = self.genus;
        let mut out = vec![vec![1]];
        for i in 1..=g {
            out.push(vec![4 * (i - 1)]);
            if i < g {
                out.push(vec![4 * (i - 1) + 1, 4 * i, 4 * i + 3, 4 * i + 2]);
            }
        }
        out.push(vec![4 * (g - 1) + 1]);
        out
    }

    pub fn curve_from_word(&self, sides: &[Side]) -> Result<CurveCoordinates, CurveError> {
        let w = CyclicWord::new(&self.polygon, sides).ok_or(CurveError::Inessential)?;
        if polygon::self_intersection(&self.polygon, &w) != 0 || !polygon::is_primitive(&w) {
            return Err(CurveError::NotSimple);
        }
        Ok(CurveCoordinates::new(Weights::from_small(polygon_word_weights(&self.polygon, w.sides())), 1))
    }

    /// The cyclic exit-side word of a single curve, when small enough to trace.
    pub fn word_of(&self, c: &CurveCoordinates) -> Option<CyclicWord> {
        let path = self.base.trace(c.weights(), TRACE_LIMIT)?;
        if path.len() as u64 != c.weights().total().try_into().unwrap_or(u64::MAX) {
            return None; // more than one component
        }
        let sides: Vec<Side> = path.iter().filter_map(|o| self.side_of.get(o).copied()).collect();
        CyclicWord::new(&self.polygon, &sides)
    }

    /// Homology class (normalised sign) of a traceable curve.
    pub fn homology_of(&self, c: &CurveCoordinates) -> Option<Vec<i64>> {
        self.word_of(c).map(|w| w.homology(&self.polygon))
    }

    /// Moves `c` to short position by weight-reducing flips.
    pub fn short_position(&self, c: &CurveCoordinates) -> Result<ShortPosition, CurveError> {
        let mut tri = self.base.clone();
        let mut x = c.weights().clone();
        let mut steps: Vec<Step> = Vec::new();
        let budget = 20_000 + 64 * x.max_bits() as usize;
        for _ in 0..budget {
            if let Some(rungs) = short_rungs(&x) {
                let to_short = Encoding::new(steps);
                let twist = self.compile_twist(&tri, &to_short, rungs)?;
                let both: Vec<[OEdge; 3]> = tri
                    .triangles()
                    .iter()
                    .filter(|t| t.iter().filter(|o| o.label() == rungs.0 || o.label() == rungs.1).count() == 2)
                    .copied()
                    .collect();
                let annulus = [*both.first().ok_or(CurveError::NoShortPosition)?, *both.last().unwrap()];
                if both.len() != 2 {
                    return Err(CurveError::NoShortPosition);
                }
                return Ok(ShortPosition { to_short, rungs, annulus, twist });
            }
            match best_reduction(&tri, &x) {
                Some(path) => {
                    for e in path {
                        let s = tri.flip(e);
                        Encoding::new(vec![s.clone()]).apply(&mut x);
                        steps.push(s);
                    }
                }
                None => return Err(CurveError::NoShortPosition),
            }
        }
        Err(CurveError::NoShortPosition)
    }

    fn compile_twist(&self, short: &Triangulation, to_short: &Encoding, rungs: (usize, usize)) -> Result<Encoding, CurveError> {
        let (r, s) = rungs;
        let is_rung = |o: OEdge| o.label() == r || o.label() == s;
        // Triangle of the annulus read from its non-rung side.
        let tri = short
            .triangles()
            .iter()
            .find(|t| t.iter().filter(|o| is_rung(**o)).count() == 2)
            .ok_or(CurveError::NoShortPosition)?;
        let k = tri.iter().position(|o| !is_rung(*o)).unwrap();
        let first = tri[(k + 1) % 3].label();
        let other = if first == r { s } else { r };

        let mut flipped = short.clone();
        let flip = flipped.flip(first);
        let n = short.edge_count();
        let mut map: Vec<usize> = (0..n).collect();
        map[first] = other;
        map[other] = first;
        let mut found = None;
        'search: for rf in [false, true] {
            for ro in [false, true] {
                let mut rev = vec![false; n];
                rev[first] = rf;
                rev[other] = ro;
                if short.is_isomorphism(&flipped, &map, &rev) {
                    found = Some(());
                    break 'search;
                }
            }
        }
        found.ok_or(CurveError::NoShortPosition)?;
        let mv = Encoding::new(vec![flip, Step::Relabel(map)]);
        let mv = if FLIP_MOVE_IS_POSITIVE { mv } else { mv.inverse() };
        Ok(to_short.clone().then(&mv).then(&to_short.inverse()))
    }

    /// Exact intersection number of two traceable curves via cyclic words.
    pub fn word_intersection(&self, a: &CurveCoordinates, b: &CurveCoordinates) -> Option<u64> {
        let wa = self.word_of(a)?;
        let wb = self.word_of(b)?;
        Some(polygon::intersection(&self.polygon, &wa, &wb))
    }
}

/// The two rungs when `x` has exactly two unit entries and zeros elsewhere.
fn short_rungs(x: &Weights) -> Option<(usize, usize)> {
    let mut ones = Vec::new();
    for i in 0..x.len() {
        match x.get_small(i)? {
            0 => {}
            1 => ones.push(i),
            _ => return None,
        }
    }
    (ones.len() == 2).then(|| (ones[0], ones[1]))
}

/// A sequence of at most three flips that strictly lowers the total weight,
/// preferring the single flip with the largest drop.
fn best_reduction(tri: &Triangulation, x: &Weights) -> Option<Vec<usize>> {
    let base = x.total();
    let n = tri.edge_count();
    let mut best: Option<(BigInt, usize)> = None;
    for e in 0..n {
        let mut y = x.clone();
        Encoding::new(vec![tri.flip_step(e)]).apply(&mut y);
        let t = y.total();
        if t < base && best.as_ref().map_or(true, |(bt, _)| t < *bt) {
            best = Some((t, e));
        }
    }
    if let Some((_, e)) = best {
        return Some(vec![e]);
    }
    for depth in 2..=3 {
        if let Some(p) = search_reduction(tri, x, &base, depth, &mut Vec::new()) {
            return Some(p);
        }
    }
    None
}

fn search_reduction(tri: &Triangulation, x: &Weights, base: &BigInt, depth: usize, path: &mut Vec<usize>) -> Option<Vec<usize>> {
    for e in 0..tri.edge_count() {
        if path.last() == Some(&e) {
            continue;
        }
        let mut t2 = tri.clone();
        let step = t2.flip(e);
        let mut y = x.clone();
        Encoding::new(vec![step]).apply(&mut y);
        path.push(e);
        if &y.total() < base {
            return Some(path.clone());
        }
        if depth > 1 {
            if let Some(p) = search_reduction(&t2, &y, base, depth - 1, path) {
                return Some(p);
            }
        }
        path.pop();
    }
    None
}
