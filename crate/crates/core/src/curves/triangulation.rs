//! One-vertex ideal triangulations and the piecewise-linear flip calculus on
//! normal coordinates.
//!
//! Edges are labelled `0..E`. Each edge has two orientations; a triangle is a
//! counterclockwise triple of oriented edges, and every oriented edge lies in
//! exactly one triangle (the one on its left). A multicurve in normal position
//! is recorded by its number of crossings with every edge.

use super::polygon::{Polygon, Side};
use super::weights::Weights;

/// An oriented edge: `2 * label` for the stored orientation, `2 * label + 1`
/// for the reverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OEdge(pub u32);

impl OEdge {
    pub fn fwd(label: usize) -> Self {
        OEdge(2 * label as u32)
    }
    pub fn rev(label: usize) -> Self {
        OEdge(2 * label as u32 + 1)
    }
    pub fn label(self) -> usize {
        (self.0 / 2) as usize
    }
    pub fn reversed(self) -> Self {
        OEdge(self.0 ^ 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    triangles: Vec<[OEdge; 3]>,
    /// `(triangle, slot)` of each oriented edge.
    place: Vec<(usize, usize)>,
}

/// One elementary move applied to coordinate vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// `x_e <- max(x_a + x_c, x_b + x_d) - x_e`.
    Flip { e: usize, a: usize, b: usize, c: usize, d: usize },
    /// `y_i <- x_{perm[i]}`.
    Relabel(Vec<usize>),
}

impl Step {
    fn inverse(&self) -> Step {
        match self {
            Step::Flip { .. } => self.clone(),
            Step::Relabel(p) => {
                let mut inv = vec![0; p.len()];
                for (i, &j) in p.iter().enumerate() {
                    inv[j] = i;
                }
                Step::Relabel(inv)
            }
        }
    }
}

/// A composite of flips and relabellings, read left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Encoding {
    steps: Vec<Step>,
}

impl Encoding {
    pub fn new(steps: Vec<Step>) -> Self {
        Encoding { steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn apply(&self, x: &mut Weights) {
        for s in &self.steps {
            match s {
                Step::Flip { e, a, b, c, d } => x.flip(*e, *a, *b, *c, *d),
                Step::Relabel(p) => x.permute(p),
            }
        }
    }

    pub fn inverse(&self) -> Encoding {
        Encoding { steps: self.steps.iter().rev().map(Step::inverse).collect() }
    }

    pub fn then(mut self, other: &Encoding) -> Encoding {
        self.steps.extend(other.steps.iter().cloned());
        self
    }
}

impl Triangulation {
    pub fn from_triangles(triangles: Vec<[OEdge; 3]>) -> Self {
        let edges = triangles.len() * 3 / 2;
        let mut place = vec![(usize::MAX, 0); 2 * edges];
        for (t, tri) in triangles.iter().enumerate() {
            for (k, o) in tri.iter().enumerate() {
                assert_eq!(place[o.0 as usize].0, usize::MAX, "oriented edge {o:?} used twice");
                place[o.0 as usize] = (t, k);
            }
        }
        assert!(place.iter().all(|p| p.0 != usize::MAX), "every oriented edge must bound a triangle");
        Triangulation { triangles, place }
    }

    /// The fan triangulation of the standard 4g-gon from corner 0. Sides keep
    /// their edge labels `0..2g`; the diagonal from corner 0 to corner `j` is
    /// labelled `2g + j - 2`.
    pub fn polygon_fan(poly: &Polygon) -> Self {
        let n = poly.sides();
        let g = poly.genus();
        let side = |j: usize| {
            let (e, fwd) = poly.edge_of(j);
            if fwd {
                OEdge::fwd(e)
            } else {
                OEdge::rev(e)
            }
        };
        let diag = |j: usize| OEdge::fwd(2 * g + j - 2);
        let mut tris = vec![[side(0), side(1), diag(2).reversed()]];
        for j in 2..n - 2 {
            tris.push([diag(j), side(j), diag(j + 1).reversed()]);
        }
        tris.push([diag(n - 2), side(n - 2), side(n - 1)]);
        Triangulation::from_triangles(tris)
    }

    pub fn edge_count(&self) -> usize {
        self.place.len() / 2
    }

    pub fn triangles(&self) -> &[[OEdge; 3]] {
        &self.triangles
    }

    /// The triangle on the left of `o`, rotated so that `o` comes first.
    pub fn corner(&self, o: OEdge) -> [OEdge; 3] {
        let (t, k) = self.place[o.0 as usize];
        let tri = self.triangles[t];
        [tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]]
    }

    /// The coordinate step realising a flip of `e`, without performing it.
    pub fn flip_step(&self, e: usize) -> Step {
        let [_, a, b] = self.corner(OEdge::fwd(e));
        let [_, c, d] = self.corner(OEdge::rev(e));
        Step::Flip { e, a: a.label(), b: b.label(), c: c.label(), d: d.label() }
    }

    /// Replaces edge `e` by the other diagonal of its quadrilateral.
    pub fn flip(&mut self, e: usize) -> Step {
        let step = self.flip_step(e);
        let (t1, _) = self.place[OEdge::fwd(e).0 as usize];
        let (t2, _) = self.place[OEdge::rev(e).0 as usize];
        assert_ne!(t1, t2, "edge {e} is not flippable");
        let [_, a, b] = self.corner(OEdge::fwd(e));
        let [_, c, d] = self.corner(OEdge::rev(e));
        self.triangles[t1] = [OEdge::fwd(e), b, c];
        self.triangles[t2] = [OEdge::rev(e), d, a];
        for t in [t1, t2] {
            for k in 0..3 {
                let o = self.triangles[t][k];
                self.place[o.0 as usize] = (t, k);
            }
        }
        step
    }

    /// True when relabelling edge `i` of `self` as edge `map[i]` of `other`
    /// (with the orientation flags `rev[i]`) carries triangles to triangles.
    pub fn is_isomorphism(&self, other: &Triangulation, map: &[usize], rev: &[bool]) -> bool {
        let image = |o: OEdge| {
            let l = map[o.label()];
            let flip = rev[o.label()] ^ (o.0 % 2 == 1);
            if flip {
                OEdge::rev(l)
            } else {
                OEdge::fwd(l)
            }
        };
        self.triangles.iter().all(|tri| {
            let t0 = image(tri[0]);
            let c = other.corner(t0);
            c[1] == image(tri[1]) && c[2] == image(tri[2])
        })
    }

    /// Checks the triangle and parity conditions of normal coordinates.
    pub fn is_admissible(&self, x: &Weights) -> bool {
        if x.len() != self.edge_count() || x.any_negative() {
            return false;
        }
        self.triangles.iter().all(|t| {
            let (p, q, r) = (x.get(t[0].label()), x.get(t[1].label()), x.get(t[2].label()));
            let s = &p + &q + &r;
            s.bit(0) == false && p <= &q + &r && q <= &p + &r && r <= &p + &q
        })
    }

    /// Follows the normal multicurve through the triangles, returning one
    /// component as the cyclic list of oriented edges it leaves triangles by.
    /// Returns `None` if the weights are too large to trace or inadmissible.
    pub fn trace(&self, x: &Weights, max_len: usize) -> Option<Vec<OEdge>> {
        let small: Vec<i64> = (0..x.len()).map(|i| x.get_small(i)).collect::<Option<_>>()?;
        let total: i64 = small.iter().sum();
        if total == 0 || total as usize > max_len {
            return None;
        }
        let start_label = small.iter().position(|&w| w > 0)?;
        let start = (OEdge::fwd(start_label), 0i64);
        let mut state = start;
        let mut out = Vec::new();
        loop {
            let (o, k) = state;
            let [_, o1, o2] = self.corner(o);
            let (xo, x1, x2) = (small[o.label()], small[o1.label()], small[o2.label()]);
            let c_start = (xo + x2 - x1) / 2;
            let (exit, pos) = if k < c_start { (o2, x2 - 1 - k) } else { (o1, xo - 1 - k) };
            out.push(exit);
            let xe = small[exit.label()];
            state = (exit.reversed(), xe - 1 - pos);
            if state == start || out.len() > max_len {
                break;
            }
        }
        if state != start {
            return None;
        }
        Some(out)
    }
}

/// Normal coordinates in the fan triangulation of a curve given by exit sides.
pub fn polygon_word_weights(poly: &Polygon, sides: &[Side]) -> Vec<i64> {
    let n = poly.sides();
    let g = poly.genus();
    let mut x = vec![0i64; 6 * g - 3];
    let m = sides.len();
    for i in 0..m {
        let s_out = sides[i];
        let s_in = poly.partner(sides[(i + m - 1) % m]);
        x[poly.edge_of(s_out).0] += 1;
        for j in 2..=n - 2 {
            if (s_in < j) != (s_out < j) {
                x[2 * g + j - 2] += 1;
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fan_has_expected_size() {
        for g in 2..=4 {
            let t = Triangulation::polygon_fan(&Polygon::new(g));
            assert_eq!(t.edge_count(), 6 * g - 3);
            assert_eq!(t.triangles().len(), 4 * g - 2);
        }
    }

    #[test]
    fn double_flip_restores_triangulation_and_weights() {
        let p = Polygon::new(2);
        let t0 = Triangulation::polygon_fan(&p);
        let x0 = Weights::from_small(polygon_word_weights(&p, &[1, 5, 4]));
        for e in 0..t0.edge_count() {
            let mut t = t0.clone();
            let mut x = x0.clone();
            let s1 = t.flip(e);
            Encoding::new(vec![s1]).apply(&mut x);
            assert!(t.is_admissible(&x));
            let s2 = t.flip(e);
            Encoding::new(vec![s2]).apply(&mut x);
            assert_eq!(x, x0);
            // Two flips turn the quadrilateral's diagonal half a turn.
            let ident: Vec<usize> = (0..t.edge_count()).collect();
            let mut rev = vec![false; ident.len()];
            rev[e] = true;
            assert!(t.is_isomorphism(&t0, &ident, &rev));
        }
    }

    #[test]
    fn trace_recovers_the_word() {
        let p = Polygon::new(2);
        let t0 = Triangulation::polygon_fan(&p);
        let x = Weights::from_small(polygon_word_weights(&p, &[1, 5, 4]));
        let path = t0.trace(&x, 1000).unwrap();
        let total: i64 = (0..x.len()).map(|i| x.get_small(i).unwrap()).sum();
        assert_eq!(path.len() as i64, total);
    }
}
