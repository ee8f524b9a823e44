//! Drawing-based filling check for curves given as cyclic side words.
//!
//! Every occurrence of a side in a word is a chord of the polygon. Points on
//! a side are ordered by comparing the bi-infinite side sequences of their
//! strands (futures first, then pasts), which draws the curves as lifts of
//! geodesics. The drawing is accepted only if its crossing counts agree with
//! the linked-pair intersection numbers, so it is in minimal position.
//!
//! Complementary regions are then assembled from the pieces of the polygon.
//! With straight chords, two boundary segments lie in the same piece exactly
//! when no chord separates them. Pieces are glued along paired segments; a
//! region built from `P` pieces and `G` gluings has Euler characteristic
//! `P - G` once the marked point is removed.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::polygon::{self, CyclicWord, Polygon, Side};

/// Why a drawing was rejected or a region was not a disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FillingReport {
    Fills,
    /// Some complementary region is neither a disk nor the punctured disk.
    EssentialRegion { region_euler: i64, contains_marked_point: bool },
    /// The drawn crossings of curves `(p, q)` did not match their
    /// intersection number, or two strands could not be ordered.
    NotMinimal { pair: (usize, usize), drawn: u64, expected: u64 },
}

fn at(w: &[Side], i: isize) -> Side {
    let n = w.len() as isize;
    w[i.rem_euclid(n) as usize]
}

fn ccw(poly: &Polygon, from: Side, to: Side) -> usize {
    (to + poly.sides() - from) % poly.sides()
}

/// Order on the entry side of chord `i` of `a` versus chord `j` of `b`; both
/// enter through the same side. `Greater` means further counterclockwise.
fn compare(poly: &Polygon, a: &[Side], i: isize, b: &[Side], j: isize) -> Ordering {
    let horizon = (a.len() + b.len()) as isize * 2 + 2;
    for t in 0..horizon {
        let e = poly.partner(at(a, i + t - 1));
        let (xa, xb) = (at(a, i + t), at(b, j + t));
        if xa != xb {
            return ccw(poly, e, xb).cmp(&ccw(poly, e, xa));
        }
    }
    for t in 1..horizon {
        let x = at(a, i - t);
        let (ea, eb) = (poly.partner(at(a, i - t - 1)), poly.partner(at(b, j - t - 1)));
        if ea != eb {
            return ccw(poly, x, ea).cmp(&ccw(poly, x, eb));
        }
    }
    Ordering::Equal
}

/// Decides whether the curves jointly fill the surface with one marked point,
/// i.e. every complementary region is a disk or a once-marked disk.
pub fn fills(poly: &Polygon, curves: &[CyclicWord]) -> FillingReport {
    let n_sides = poly.sides();
    let fwd: Vec<&[Side]> = curves.iter().map(|c| c.sides()).collect();
    let inverses: Vec<CyclicWord> = curves.iter().map(|c| c.inverse(poly)).collect();
    let rev: Vec<&[Side]> = inverses.iter().map(|c| c.sides()).collect();

    // Crossing `j` of curve `k` sits between chords `j` and `j + 1`. On side
    // `partner(v[j])` it is where chord `j + 1` enters; on side `v[j]` it is
    // where the reversed chord `m - j` enters the reversed word.
    #[derive(Clone, Copy)]
    struct Point {
        curve: usize,
        crossing: usize,
        reversed: bool,
        chord: usize,
    }
    let mut on_side: Vec<Vec<Point>> = vec![Vec::new(); n_sides];
    for (k, v) in fwd.iter().enumerate() {
        let m = v.len();
        for j in 0..m {
            on_side[poly.partner(v[j])].push(Point { curve: k, crossing: j, reversed: false, chord: (j + 1) % m });
            on_side[v[j]].push(Point { curve: k, crossing: j, reversed: true, chord: (m - j) % m });
        }
    }
    let word = |p: &Point| if p.reversed { rev[p.curve] } else { fwd[p.curve] };
    let flipped = |p: &Point| {
        let m = fwd[p.curve].len();
        let chord = if p.reversed { (p.crossing + 1) % m } else { (m - p.crossing) % m };
        Point { reversed: !p.reversed, chord, ..*p }
    };
    // Each pair is compared in one orientation, the one in which the strand
    // of the lower curve runs forwards, so that a linked pair crosses once.
    let cmp = |p: &Point, q: &Point| {
        let forwards = match p.curve.cmp(&q.curve) {
            Ordering::Less => !p.reversed,
            Ordering::Greater => !q.reversed,
            Ordering::Equal => !(p.reversed && q.reversed),
        };
        if forwards {
            compare(poly, word(p), p.chord as isize, word(q), q.chord as isize)
        } else {
            let (fp, fq) = (flipped(p), flipped(q));
            compare(poly, word(&fp), fp.chord as isize, word(&fq), fq.chord as isize).reverse()
        }
    };
    for list in on_side.iter_mut() {
        // Insertion sort: the pair rule need not be transitive, so the
        // result is checked pairwise instead of trusted.
        for i in 1..list.len() {
            let mut j = i;
            while j > 0 && cmp(&list[j - 1], &list[j]) == Ordering::Greater {
                list.swap(j - 1, j);
                j -= 1;
            }
        }
        for a in 0..list.len() {
            for b in a + 1..list.len() {
                if cmp(&list[a], &list[b]) != Ordering::Less {
                    return FillingReport::NotMinimal { pair: (list[a].curve, list[b].curve), drawn: 0, expected: 0 };
                }
            }
        }
    }
    let count: Vec<usize> = on_side.iter().map(Vec::len).collect();
    // Position of each crossing on the side where its strand enters forwards.
    let mut pos: HashMap<(usize, usize, bool), usize> = HashMap::new();
    for list in &on_side {
        for (t, p) in list.iter().enumerate() {
            pos.insert((p.curve, p.crossing, p.reversed), t);
        }
    }
    // The two copies of a crossing must sit at mirrored positions.
    for (k, v) in fwd.iter().enumerate() {
        for j in 0..v.len() {
            if pos[&(k, j, false)] + pos[&(k, j, true)] + 1 != count[v[j]] {
                return FillingReport::NotMinimal { pair: (k, k), drawn: 0, expected: 0 };
            }
        }
    }
    let scale = count.iter().max().copied().unwrap_or(0) + 2;
    let coord = |s: Side, t: usize| s * scale + t + 1;
    // Chords as (circle coordinate of entry, of exit, curve).
    let mut chords: Vec<(usize, usize, usize)> = Vec::new();
    for (k, v) in fwd.iter().enumerate() {
        let m = v.len();
        for i in 0..m {
            let prev = (i + m - 1) % m;
            let entry = coord(poly.partner(v[prev]), pos[&(k, prev, false)]);
            let exit = coord(v[i], pos[&(k, i, true)]);
            chords.push((entry, exit, k));
        }
    }
    let inside = |p: usize, lo: usize, hi: usize| if lo < hi { p > lo && p < hi } else { p > lo || p < hi };
    let crosses = |a: (usize, usize, usize), b: (usize, usize, usize)| inside(b.0, a.0, a.1) != inside(b.1, a.0, a.1);

    let k = curves.len();
    let mut drawn = vec![vec![0u64; k]; k];
    for x in 0..chords.len() {
        for y in x + 1..chords.len() {
            if crosses(chords[x], chords[y]) {
                let (p, q) = (chords[x].2, chords[y].2);
                drawn[p.min(q)][p.max(q)] += 1;
            }
        }
    }
    for p in 0..k {
        if drawn[p][p] != 0 {
            return FillingReport::NotMinimal { pair: (p, p), drawn: drawn[p][p], expected: 0 };
        }
        for q in p + 1..k {
            let expected = polygon::intersection(poly, &curves[p], &curves[q]);
            if drawn[p][q] != expected {
                return FillingReport::NotMinimal { pair: (p, q), drawn: drawn[p][q], expected };
            }
        }
    }

    // Boundary segments: side s has count[s] + 1 of them; segment r of side
    // s sits between points r - 1 and r. Its midpoint coordinate is
    // s * scale + r + 1/2, doubled to stay integral.
    let mut seg_index = Vec::with_capacity(n_sides);
    let mut segs: Vec<usize> = Vec::new();
    for s in 0..n_sides {
        seg_index.push(segs.len());
        for r in 0..=count[s] {
            segs.push(2 * (s * scale + r) + 1);
        }
    }
    let doubled: Vec<(usize, usize)> = chords.iter().map(|c| (2 * c.0, 2 * c.1)).collect();
    // Segments share a piece exactly when every chord has both or neither
    // of them on its inner arc.
    let words_per = doubled.len().div_ceil(64);
    let mut groups: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut piece = Vec::with_capacity(segs.len());
    for (u, &x) in segs.iter().enumerate() {
        let mut bits = vec![0u64; words_per];
        for (c, &(p, q)) in doubled.iter().enumerate() {
            if x > p.min(q) && x < p.max(q) {
                bits[c / 64] |= 1 << (c % 64);
            }
        }
        piece.push(*groups.entry(bits).or_insert(u));
    }
    let mut regions = UnionFind::new(segs.len());
    let mut gluings = Vec::new();
    for s in 0..n_sides {
        let ps = poly.partner(s);
        if s > ps {
            continue;
        }
        for r in 0..=count[s] {
            let u = seg_index[s] + r;
            let v = seg_index[ps] + count[ps] - r;
            regions.union(piece[u], piece[v]);
            gluings.push(piece[u]);
        }
    }
    let mut euler: std::collections::BTreeMap<usize, i64> = std::collections::BTreeMap::new();
    let mut distinct: Vec<usize> = piece.clone();
    distinct.sort_unstable();
    distinct.dedup();
    for &p in &distinct {
        *euler.entry(regions.find(p)).or_default() += 1;
    }
    for &p in &gluings {
        *euler.entry(regions.find(p)).or_default() -= 1;
    }
    // Segment 0 of side 0 touches a polygon corner, i.e. the marked point.
    let marked = regions.find(piece[0]);
    for (&r, &chi) in &euler {
        let expected = if r == marked { 0 } else { 1 };
        if chi != expected {
            return FillingReport::EssentialRegion { region_euler: chi, contains_marked_point: r == marked };
        }
    }
    FillingReport::Fills
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
