//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use mcglab::curves::*;
use mcglab::homology::SymplecticMatrix;
use mcglab::surface::*;
use num_bigint::BigInt;
use num_traits::{One, Zero};

pub fn humphries(g: i64) -> GeneratorSet {
    humphries_generators(&make_surface(g, 0).unwrap()).unwrap()
}

pub type Poly = Vec<BigInt>;

pub fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn padd(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    trim(out)
}

pub fn pmul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn pneg(a: &Poly) -> Poly {
    a.iter().map(|c| -c).collect()
}

/// Laplace expansion along the first row, with polynomial entries.
pub fn det_by_minors(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = vec![];
    for j in 0..n {
        let minor: Vec<Vec<Poly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect()).collect();
        let term = pmul(&m[0][j], &det_by_minors(&minor));
        total = padd(&total, &if j % 2 == 0 { term } else { pneg(&term) });
    }
    total
}

/// `det(t I - M)` by cofactor expansion.
pub fn char_poly_oracle(m: &SymplecticMatrix) -> Poly {
    let n = m.dim();
    let entries: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = -m.get(i, j).clone();
                    if i == j {
                        trim(vec![c, BigInt::one()])
                    } else {
                        trim(vec![c])
                    }
                })
                .collect()
        })
        .collect();
    det_by_minors(&entries)
}

pub fn divides(d: &Poly, p: &Poly) -> bool {
    // Monic long division.
    let mut r = p.clone();
    let dd = d.len() - 1;
    while r.len() > dd {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - dd;
        for (i, c) in d.iter().enumerate() {
            r[shift + i] -= &lead * c;
        }
        r = trim(r);
    }
    r.is_empty()
}

/// All freely reduced words of length at most `k`, listed explicitly.
pub fn all_words(n: usize, k: usize) -> Vec<MappingClassWord> {
    let mut out = vec![MappingClassWord::identity()];
    let mut layer = out.clone();
    for _ in 0..k {
        let mut next = Vec::new();
        for w in &layer {
            for i in 0..n {
                for inv in [false, true] {
                    let l = Letter::new(i, inv);
                    if w.letters().last() != Some(&l.inv()) {
                        let mut v = w.clone();
                        v.push(l);
                        next.push(v);
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Quadratic oracle: pairs whose quotient equals some short word.
pub fn brute_dense(gs: &GeneratorSet, words: &[MappingClassWord], k: usize) -> Vec<MappingClassWord> {
    let short = all_words(gs.len(), k);
    let mut keep = vec![false; words.len()];
    for i in 0..words.len() {
        for j in 0..words.len() {
            if i == j {
                continue;
            }
            let q = words[i].inverse().concat(&words[j]);
            if short.iter().any(|v| alexander_identity_test(gs, &v.inverse().concat(&q))) {
                keep[i] = true;
            }
        }
    }
    words.iter().zip(keep).filter(|(_, k)| *k).map(|(w, _)| w.clone()).collect()
}

/// Endpoint counts of all `4^n` walks on the square lattice.
pub fn lattice_walk_counts(n: usize) -> HashMap<(i64, i64), u64> {
    let mut paths: HashMap<(i64, i64), u64> = HashMap::new();
    for code in 0..4u64.pow(n as u32) {
        let (mut x, mut y, mut c) = (0i64, 0i64, code);
        for _ in 0..n {
            match c % 4 {
                0 => x += 1,
                1 => x -= 1,
                2 => y += 1,
                _ => y -= 1,
            }
            c /= 4;
        }
        *paths.entry((x, y)).or_default() += 1;
    }
    paths
}
