//! The fundamental 4g-gon and curves written as cyclic words of polygon sides.
//!
//! Sides are numbered counterclockwise `0..4g`; handle `h` owns the sides
//! `4h..4h+4`, read as `a_h b_h a_h^-1 b_h^-1`. Gluing paired sides gives the
//! genus-g surface with every polygon corner identified to the single marked
//! point. A closed curve that avoids the marked point is recorded as the cyclic
//! sequence of sides through which it leaves the polygon; it re-enters through
//! the partner side. Cyclically reduced words are exactly the curves in minimal
//! position with the sides, so the word is a canonical description once the
//! rotation and the direction of travel are normalised.
//!
//! Dually, the polygon centre is the single vertex of a ribbon graph whose
//! half-edges point at the sides in counterclockwise order. Geometric
//! intersection numbers are counted on that ribbon graph by the linked-pair
//! rule: two strands cross either transversally at the vertex, or once along a
//! maximal shared path whose two ends put them on opposite sides.

use std::cmp::Ordering;

/// Index of a polygon side, counterclockwise from side 0.
pub type Side = usize;

/// The side-pairing pattern of the standard 4g-gon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Polygon {
    genus: usize,
}

impl Polygon {
    pub fn new(genus: usize) -> Self {
        assert!(genus >= 1, "polygon model needs genus >= 1");
        Polygon { genus }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn sides(&self) -> usize {
        4 * self.genus
    }

    /// The side glued to `s`.
    pub fn partner(&self, s: Side) -> Side {
        let base = s - s % 4;
        match s % 4 {
            0 => base + 2,
            1 => base + 3,
            2 => base,
            _ => base + 1,
        }
    }

    /// Edge label (`2h` for `a_h`, `2h+1` for `b_h`) and whether the side
    /// runs along the edge's own orientation.
    pub fn edge_of(&self, s: Side) -> (usize, bool) {
        let h = s / 4;
        match s % 4 {
            0 => (2 * h, true),
            1 => (2 * h + 1, true),
            2 => (2 * h, false),
            _ => (2 * h + 1, false),
        }
    }

    fn ccw(&self, from: Side, to: Side) -> usize {
        (to + self.sides() - from) % self.sides()
    }
}

/// A cyclically reduced cyclic word of exit sides.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    sides: Vec<Side>,
}

impl CyclicWord {
    /// Builds the word, reducing it freely and cyclically. Returns `None` when
    /// the word reduces to nothing.
    pub fn new(poly: &Polygon, sides: &[Side]) -> Option<Self> {
        let mut stack: Vec<Side> = Vec::with_capacity(sides.len());
        for &s in sides {
            assert!(s < poly.sides(), "side {s} out of range");
            // Leaving through s right after entering through s is a backtrack.
            if let Some(&last) = stack.last() {
                if poly.partner(last) == s {
                    stack.pop();
                    continue;
                }
            }
            stack.push(s);
        }
        let mut lo = 0;
        let mut hi = stack.len();
        while hi - lo >= 2 && poly.partner(stack[hi - 1]) == stack[lo] {
            lo += 1;
            hi -= 1;
        }
        if lo == hi {
            return None;
        }
        Some(CyclicWord { sides: stack[lo..hi].to_vec() })
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    /// The same curve traversed backwards.
    pub fn inverse(&self, poly: &Polygon) -> CyclicWord {
        CyclicWord { sides: self.sides.iter().rev().map(|&s| poly.partner(s)).collect() }
    }

    /// Lexicographically least rotation of the word or of its inverse.
    pub fn canonical(&self, poly: &Polygon) -> CyclicWord {
        let a = least_rotation(&self.sides);
        let b = least_rotation(&self.inverse(poly).sides);
        CyclicWord { sides: if a <= b { a } else { b } }
    }

    /// Concatenation of two based loops read as words.
    pub fn concat(poly: &Polygon, a: &[Side], b: &[Side]) -> Option<CyclicWord> {
        let mut v = a.to_vec();
        v.extend_from_slice(b);
        CyclicWord::new(poly, &v)
    }

    /// Homology class in the basis `(α_1..α_g, β_1..β_g)`, α_h = [a_h],
    /// β_h = [b_h], normalised so that the first nonzero entry is positive.
    pub fn homology(&self, poly: &Polygon) -> Vec<i64> {
        let g = poly.genus();
        let mut crossings = vec![0i64; 2 * g];
        for &s in &self.sides {
            let (e, fwd) = poly.edge_of(s);
            crossings[e] += if fwd { 1 } else { -1 };
        }
        // Crossing b_h counts α_h; crossing a_h counts -β_h.
        let mut class = vec![0i64; 2 * g];
        for h in 0..g {
            class[h] = crossings[2 * h + 1];
            class[g + h] = -crossings[2 * h];
        }
        normalise_sign(&mut class);
        class
    }
}

pub(crate) fn normalise_sign(v: &mut [i64]) {
    if let Some(first) = v.iter().find(|x| **x != 0) {
        if *first < 0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn least_rotation(v: &[Side]) -> Vec<Side> {
    let n = v.len();
    let mut best = 0;
    for r in 1..n {
        let cmp = (0..n).map(|i| v[(r + i) % n].cmp(&v[(best + i) % n])).find(|c| *c != Ordering::Equal);
        if cmp == Some(Ordering::Less) {
            best = r;
        }
    }
    (0..n).map(|i| v[(best + i) % n]).collect()
}

/// Strand data at the polygon centre: the half-edge a strand arrives on and
/// the one it leaves by, at position `i` of the word.
fn in_out(poly: &Polygon, w: &[Side], i: usize) -> (Side, Side) {
    let n = w.len();
    (poly.partner(w[(i + n - 1) % n]), w[i % n])
}

fn strictly_between(poly: &Polygon, from: Side, to: Side, x: Side) -> bool {
    let d = poly.ccw(from, x);
    d > 0 && d < poly.ccw(from, to)
}

/// Counts crossings of strand pairs `(i, j)`. When `transverse` is false only
/// shared-path crossings are counted (used for the reversed partner word).
fn linked_pairs(poly: &Polygon, v: &[Side], w: &[Side], transverse: bool, skip_diagonal: bool) -> u64 {
    let (m, n) = (v.len(), w.len());
    let limit = m * n + m + n;
    let mut count = 0;
    for i in 0..m {
        for j in 0..n {
            if skip_diagonal && i == j {
                continue;
            }
            let (iv, ov) = in_out(poly, v, i);
            let (iw, ow) = in_out(poly, w, j);
            if iv != iw && iv != ow && ov != iw && ov != ow {
                if transverse {
                    let a = strictly_between(poly, iv, ov, iw);
                    let b = strictly_between(poly, iv, ov, ow);
                    if a != b {
                        count += 1;
                    }
                }
                continue;
            }
            if ov != ow || iv == iw {
                continue;
            }
            // A shared path starts here; follow it to where the strands part.
            let start_v_left = poly.ccw(ov, iv) < poly.ccw(ov, iw);
            let mut t = 1;
            loop {
                if t > limit {
                    break; // identical periodic strands never part
                }
                let ovt = v[(i + t) % m];
                let owt = w[(j + t) % n];
                if ovt != owt {
                    let h = poly.partner(v[(i + t - 1) % m]);
                    let end_v_right = poly.ccw(h, ovt) < poly.ccw(h, owt);
                    if start_v_left == end_v_right {
                        count += 1;
                    }
                    break;
                }
                t += 1;
            }
        }
    }
    count
}

/// Geometric intersection number of two curves given as cyclic words.
pub fn intersection(poly: &Polygon, v: &CyclicWord, w: &CyclicWord) -> u64 {
    let winv = w.inverse(poly);
    linked_pairs(poly, &v.sides, &w.sides, true, false) + linked_pairs(poly, &v.sides, &winv.sides, false, false)
}

/// Number of self-crossings of a curve in minimal position.
pub fn self_intersection(poly: &Polygon, v: &CyclicWord) -> u64 {
    let vinv = v.inverse(poly);
    let total = linked_pairs(poly, &v.sides, &v.sides, true, true) + linked_pairs(poly, &v.sides, &vinv.sides, false, false);
    total / 2
}

/// True when the word is a primitive element, i.e. not a proper power.
pub fn is_primitive(v: &CyclicWord) -> bool {
    let n = v.len();
    (1..n).filter(|d| n % d == 0).all(|d| (0..n).any(|i| v.sides[i] != v.sides[(i + d) % n]))
}
